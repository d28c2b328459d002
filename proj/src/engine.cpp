#include "swarmloc/engine.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>

namespace swarmloc {
namespace {

enum Stream : std::uint64_t { kInit = 1, kMobility = 2, kMeasure = 3, kAttack = 4 };

}  // namespace

ScenarioConfig resolve_scenario(ScenarioConfig cfg) {
  if (auto* c = std::get_if<CoordinatedStrategy>(&cfg.attacker.strategy); c && c->start == 0)
    c->start = centered_window_start(cfg.horizon, c->window);
  if (auto* s = std::get_if<StalkingStrategy>(&cfg.attacker.strategy))
    s->victim = static_cast<UavId>(cfg.n_anchors + cfg.victim_index);
  return cfg;
}

Simulation::Simulation(const ScenarioConfig& cfg, std::shared_ptr<const ErrorConverter> converter,
                       std::uint64_t rep_seed, int rep, bool trace_reputation)
    : cfg_(resolve_scenario(cfg)),
      converter_(std::move(converter)),
      rep_(rep),
      trace_enabled_(trace_reputation),
      mobility_rng_(derive_seed(rep_seed, kMobility, 0)),
      measure_rng_(derive_seed(rep_seed, kMeasure, 0)),
      attack_rng_(derive_seed(rep_seed, kAttack, 0)) {
  if (!converter_) throw ConfigError("Simulation: missing error converter");
  Rng init(derive_seed(rep_seed, kInit, 0));
  world_ = init_world(cfg_, init);
  for (UavId id : world_.target_ids()) {
    TargetState ts;
    ts.id = id;
    ts.reputation = ReputationTable(id);
    // Prior used only until the first estimate exists.
    ts.magd.p_hat = cfg_.layout == Layout::kMap ? Vec3(cfg_.map_size / 2.0) : world_.uavs[id].true_pos;
    targets_.push_back(std::move(ts));
  }
}

const ReputationTable& Simulation::reputation_of(UavId target) const {
  for (const auto& ts : targets_)
    if (ts.id == target) return ts.reputation;
  throw DomainError("reputation_of: not a target");
}

Vec3 Simulation::estimate_with_baseline(TargetState& ts, const ObservationSet& trusted,
                                        bool& coasting) {
  const Vec3 start = ts.magd.initialized ? ts.magd.p_hat : centroid_of_reports(trusted);
  try {
    switch (cfg_.solver) {
      case Solver::kGd:
        if (trusted.empty()) throw NoAnchorError("no anchors");
        return localize_gd(trusted, cfg_.gd, start);
      case Solver::kLs:
        return localize_ls(trusted);
      case Solver::kL1Admm:
        return localize_l1_admm(trusted, cfg_.admm);
      case Solver::kMagd:
        break;
    }
  } catch (const SingularGeometryError&) {
  } catch (const NoAnchorError&) {
  }
  coasting = true;
  return ts.magd.p_hat;
}

std::vector<MetricsRecord> Simulation::tick() {
  world_.t += 1;
  const int t = world_.t;
  step_mobility(world_, cfg_, mobility_rng_);

  const auto cloud_view = cloud_.view();
  std::vector<ReputationTable> staged;
  std::vector<MetricsRecord> out;
  out.reserve(targets_.size());

  const auto& atk = cfg_.attacker;
  const bool tad = cfg_.defense.tad;
  const bool rp = cfg_.defense.rp;

  for (auto& ts : targets_) {
    const auto& me = world_.uavs[ts.id];
    const auto nbrs = neighbors_in_range(world_, ts.id, cfg_.range);

    ObservationSet obs;
    obs.target_id = ts.id;
    obs.reports.reserve(nbrs.size());
    for (UavId n : nbrs) {
      const auto& anchor = world_.uavs[n];
      AnchorReport rep = observe(anchor, me.true_pos, cfg_.channel, measure_rng_);
      if (anchor.malicious && attack_active(atk.strategy, n, ts.id, t, attack_rng_))
        rep = tamper_report(atk.mode, rep, attack_rng_);
      obs.reports.push_back(rep);
    }

    std::vector<double> reputations(obs.size(), 1.0);
    if (tad) {
      for (std::size_t i = 0; i < obs.size(); ++i) {
        const UavId n = obs.reports[i].anchor_id;
        reputations[i] = rp ? propagate_reputation(ts.reputation, cloud_view, n, cfg_.defense.propagation)
                            : ts.reputation.get(n);
      }
    }

    MetricsRecord rec;
    rec.rep = rep_;
    rec.t = t;
    rec.target = ts.id;
    rec.n_in_range = static_cast<int>(obs.size());

    std::vector<ConvertedError> conversions;
    Vec3 p_hat;
    if (cfg_.solver == Solver::kMagd) {
      auto res = magd_tick(ts.magd, obs, reputations, *converter_, cfg_.magd);
      p_hat = res.p_hat;
      rec.alpha_hat = res.alpha_hat;
      rec.d_bar = res.d_bar;
      rec.coasting = res.coasting;
      conversions = std::move(res.conversions);
    } else {
      ObservationSet trusted;
      trusted.target_id = ts.id;
      for (std::size_t i = 0; i < obs.size(); ++i)
        if (reputations[i] > 0.0) trusted.reports.push_back(obs.reports[i]);
      bool coasting = false;
      p_hat = estimate_with_baseline(ts, trusted, coasting);
      if (!coasting) {
        ts.magd.p_hat = p_hat;
        ts.magd.initialized = true;
      }
      rec.coasting = coasting;
      for (const auto& r : obs.reports)
        conversions.push_back((*converter_)(r.measured_distance, r.reported_sigma_p));
    }
    rec.err = (p_hat - me.true_pos).norm();
    rec.p_hat = p_hat;
    rec.true_pos = me.true_pos;

    if (tad && ts.magd.initialized) {
      for (std::size_t i = 0; i < obs.size(); ++i) {
        const double r = tad_update(ts.reputation, obs.reports[i], p_hat, conversions[i],
                                    cfg_.defense.tad_params);
        if (trace_enabled_)
          trace_.push_back({rep_, t, ts.id, obs.reports[i].anchor_id, r, reputations[i]});
      }
    }
    if (rp) {
      ReputationTable shared = ts.reputation;
      if (me.malicious && cfg_.defense.malicious_sharing == ReputationSharing::kInvert) {
        ReputationTable inverted(ts.id);
        for (const auto& [n, r] : shared.entries()) inverted.set(n, 1.0 - r);
        shared = std::move(inverted);
      }
      staged.push_back(std::move(shared));
    }
    out.push_back(rec);
  }

  for (const auto& table : staged) upload_reputation(table, cloud_, t);
  return out;
}

std::vector<MetricsRecord> Simulation::run() {
  std::vector<MetricsRecord> all;
  all.reserve(static_cast<std::size_t>(cfg_.horizon) * targets_.size());
  while (world_.t < cfg_.horizon) {
    auto recs = tick();
    all.insert(all.end(), recs.begin(), recs.end());
  }
  return all;
}

ErrorSummary summarize(const std::vector<MetricsRecord>& records) {
  ErrorSummary s;
  s.count = records.size();
  if (records.empty()) return s;
  double sum = 0.0;
  for (const auto& r : records) sum += r.err;
  s.mean = sum / static_cast<double>(records.size());
  double sq = 0.0;
  for (const auto& r : records) sq += (r.err - s.mean) * (r.err - s.mean);
  s.std = records.size() > 1 ? std::sqrt(sq / static_cast<double>(records.size() - 1)) : 0.0;
  return s;
}

std::shared_ptr<const ErrorConverter> make_converter(const RangingChannel& ch) {
  ch.validate();
  const SigmaDTable table = ch.sigma_d.empty() ? build_default_sigma_d_table(ch) : ch.sigma_d;
  return std::make_shared<const ErrorConverter>(table);
}

void parallel_for(std::size_t count, int parallelism, const std::function<void(std::size_t)>& job) {
  const auto workers = static_cast<std::size_t>(std::max(1, parallelism));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
  const ScenarioConfig resolved = resolve_scenario(cfg);
  resolved.validate();
  auto converter = options.converter ? options.converter : make_converter(resolved.channel);

  const auto reps = static_cast<std::size_t>(resolved.repetitions);
  std::vector<std::vector<MetricsRecord>> per_rep(reps);
  std::vector<std::vector<ReputationTraceRecord>> traces(reps);
  std::optional<UavId> victim;
  parallel_for(reps, options.parallelism, [&](std::size_t r) {
    Simulation sim(resolved, converter, derive_seed(resolved.seed, options.cell, r),
                   static_cast<int>(r), options.trace_reputation);
    per_rep[r] = sim.run();
    traces[r] = sim.reputation_trace();
  });
  if (auto* s = std::get_if<StalkingStrategy>(&resolved.attacker.strategy)) victim = s->victim;

  ScenarioResult result;
  for (auto& v : per_rep) result.records.insert(result.records.end(), v.begin(), v.end());
  for (auto& v : traces) result.reputation_trace.insert(result.reputation_trace.end(), v.begin(), v.end());
  result.summary = summarize(result.records);
  result.victim = victim;
  result.sigma_d_seed = resolved.channel.sigma_d.empty() ? kSigmaDTableSeed
                                                         : resolved.channel.sigma_d.derivation_seed();
  return result;
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRecord>& records,
                       const std::string& run_id) {
  os << "run_id,rep,t,target_id,err_m,n_in_range,alpha_hat,d_bar,coasting\n";
  for (const auto& r : records)
    os << fmt::format("{},{},{},{},{:.6f},{},{:.6f},{:.6f},{}\n", run_id, r.rep, r.t, r.target, r.err,
                      r.n_in_range, r.alpha_hat, r.d_bar, r.coasting ? 1 : 0);
}

void write_reputation_csv(std::ostream& os, const std::vector<ReputationTraceRecord>& records) {
  os << "rep,t,owner,neighbor,r,r_blend\n";
  for (const auto& r : records)
    os << fmt::format("{},{},{},{},{:.6f},{:.6f}\n", r.rep, r.t, r.owner, r.neighbor, r.r, r.r_blend);
}

}  // namespace swarmloc
