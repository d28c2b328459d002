// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 when
// any criterion fails.

#include "swarmloc/benchmarks.hpp"
#include "swarmloc/engine.hpp"
#include "swarmloc/presets.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>
#include <thread>

using namespace swarmloc;

namespace {

// Pinned tolerances.
constexpr double kSetup1Lo = 1.1, kSetup1Hi = 1.9;
constexpr double kSetup1FixedSlack = 0.1;
constexpr double kLsFlatRatio = 2.0;
constexpr double kGdSpread = 0.5;  // (max - min) / mean over shapes
constexpr double kNoAttackLo = 1.2, kNoAttackHi = 2.0;
constexpr double kCoordBiasMin = 5.0;
constexpr double kCoordBiasTadMax = 3.0;
constexpr double kRandomBiasMax = 2.2;
constexpr double kTadNoHarm = 0.3;
constexpr double kStalkBaselineGap = 1.0;
constexpr double kConvergeBand = 0.10;

constexpr int kSetup2Reps = 10;
constexpr int kStalkReps = 20;

int g_failures = 0;

void report(int id, bool ok, const std::string& detail) {
  if (!ok) ++g_failures;
  fmt::print("[{}] criterion {}: {}\n", ok ? "PASS" : "FAIL", id, detail);
  std::fflush(stdout);
}

int workers() { return static_cast<int>(std::max(1U, std::thread::hardware_concurrency())); }

std::shared_ptr<const ErrorConverter> converter() {
  static const auto c = make_converter(RangingChannel{});
  return c;
}

ScenarioResult run(ScenarioConfig cfg, int reps) {
  cfg.repetitions = reps;
  RunOptions opt;
  opt.parallelism = workers();
  opt.converter = converter();
  return run_scenario(cfg, opt);
}

void criterion_setup1() {
  StepsizeBenchConfig cfg;
  const auto res = run_stepsize_benchmark(cfg, workers());
  const double magd = res.magd_mean();
  const auto fixed = res.fixed_means();
  const auto best = std::min_element(fixed.begin(), fixed.end());
  const double best_alpha = res.alphas[static_cast<std::size_t>(best - fixed.begin())];
  const bool in_band = magd >= kSetup1Lo && magd <= kSetup1Hi;
  const bool beats = magd <= *best + kSetup1FixedSlack;
  report(1, in_band && beats,
         fmt::format("MAGD mean {:.3f} m (band [{}, {}]: {}); best fixed alpha {:.1f} -> {:.3f} m, "
                     "MAGD <= best + {}: {}",
                     magd, kSetup1Lo, kSetup1Hi, in_band ? "ok" : "no", best_alpha, *best,
                     kSetup1FixedSlack, beats ? "ok" : "no"));
}

void criterion_geometry() {
  GeometryBenchConfig cfg;
  const auto rows = run_geometry_benchmark(cfg, workers());
  const auto flat = std::min_element(rows.begin(), rows.end(),
                                     [](auto& a, auto& b) { return a.half_height < b.half_height; });
  const auto cubic = std::min_element(rows.begin(), rows.end(), [](auto& a, auto& b) {
    return std::abs(a.half_height - a.half_width) < std::abs(b.half_height - b.half_width);
  });
  double lo = 1e300, hi = 0.0, sum = 0.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.gd);
    hi = std::max(hi, r.gd);
    sum += r.gd;
  }
  const double spread = (hi - lo) / (sum / static_cast<double>(rows.size()));
  const bool gd_best = flat->gd < flat->ls && flat->gd < flat->l1;
  const bool ls_degrades = flat->ls >= kLsFlatRatio * cubic->ls;
  const bool stable = spread <= kGdSpread;
  report(2, gd_best && ls_degrades && stable,
         fmt::format("flattest (c={:.0f}) GD {:.2f} < LS {:.2f}, L1 {:.2f}: {}; LS flat/cubic (c={:.0f}) "
                     "{:.2f} >= {}: {}; GD spread {:.2f} <= {}: {}",
                     flat->half_height, flat->gd, flat->ls, flat->l1, gd_best ? "ok" : "no",
                     cubic->half_height, flat->ls / cubic->ls, kLsFlatRatio, ls_degrades ? "ok" : "no",
                     spread, kGdSpread, stable ? "ok" : "no"));
}

struct Setup2Table {
  double none = 0.0, none_tad = 0.0;
  std::map<int, double> coord, random;
  double coord_tad_30 = 0.0;
};

Setup2Table run_setup2() {
  Setup2Table t;
  t.none = run(make_preset("setup2-none"), kSetup2Reps).summary.mean;
  t.none_tad = run(make_preset("setup2-none-tad"), kSetup2Reps).summary.mean;
  for (int n : {20, 30, 40, 50}) {
    t.coord[n] = run(make_preset(fmt::format("setup2-coord-bias-{}", n)), kSetup2Reps).summary.mean;
    t.random[n] = run(make_preset(fmt::format("setup2-random-bias-{}", n)), kSetup2Reps).summary.mean;
  }
  t.coord_tad_30 = run(make_preset("setup2-coord-bias-tad-30"), kSetup2Reps).summary.mean;
  return t;
}

void criterion_setup2(const Setup2Table& t) {
  const bool none_ok = t.none >= kNoAttackLo && t.none <= kNoAttackHi;
  const bool coord_ok = t.coord.at(30) >= kCoordBiasMin && t.coord.at(40) >= kCoordBiasMin;
  const bool tad_ok = t.coord_tad_30 <= kCoordBiasTadMax;
  const bool random_ok = t.random.at(30) <= kRandomBiasMax;
  bool order_ok = true;
  std::string order;
  for (const auto& [n, c] : t.coord) {
    order_ok = order_ok && c > t.random.at(n);
    order += fmt::format(" {}:{:.2f}/{:.2f}", n, c, t.random.at(n));
  }
  report(3, none_ok && coord_ok && tad_ok && random_ok && order_ok,
         fmt::format("no attack {:.2f} in [{}, {}]: {}; coord bias 30/40 {:.2f}/{:.2f} >= {}: {}; "
                     "coord bias+TAD {:.2f} <= {}: {}; random bias {:.2f} <= {}: {}; "
                     "coord > random{}: {}",
                     t.none, kNoAttackLo, kNoAttackHi, none_ok ? "ok" : "no", t.coord.at(30),
                     t.coord.at(40), kCoordBiasMin, coord_ok ? "ok" : "no", t.coord_tad_30,
                     kCoordBiasTadMax, tad_ok ? "ok" : "no", t.random.at(30), kRandomBiasMax,
                     random_ok ? "ok" : "no", order, order_ok ? "ok" : "no"));
}

void criterion_tad_no_harm(const Setup2Table& t) {
  const double gap = std::abs(t.none_tad - t.none);
  report(4, gap <= kTadNoHarm,
         fmt::format("TAD on {:.3f} m, off {:.3f} m, |diff| {:.3f} <= {}", t.none_tad, t.none, gap,
                     kTadNoHarm));
}

struct StalkCurve {
  std::vector<double> per_tick;  // victim error averaged over repetitions
  double final_quarter = 0.0;
  int converged_at = 0;  // first tick within the band around the final value
};

StalkCurve stalk(const std::string& name) {
  const auto cfg = make_preset(name);
  const auto res = run(cfg, kStalkReps);
  StalkCurve c;
  c.per_tick.assign(static_cast<std::size_t>(cfg.horizon), 0.0);
  std::vector<int> count(c.per_tick.size(), 0);
  for (const auto& r : res.records) {
    if (!res.victim || r.target != *res.victim) continue;
    c.per_tick[static_cast<std::size_t>(r.t - 1)] += r.err;
    count[static_cast<std::size_t>(r.t - 1)] += 1;
  }
  for (std::size_t i = 0; i < c.per_tick.size(); ++i) c.per_tick[i] /= std::max(count[i], 1);
  const std::size_t q = c.per_tick.size() * 3 / 4;
  double s = 0.0;
  for (std::size_t i = q; i < c.per_tick.size(); ++i) s += c.per_tick[i];
  c.final_quarter = s / static_cast<double>(c.per_tick.size() - q);
  c.converged_at = cfg.horizon;
  for (std::size_t i = 0; i < c.per_tick.size(); ++i)
    if (std::abs(c.per_tick[i] - c.final_quarter) <= kConvergeBand * c.final_quarter) {
      c.converged_at = static_cast<int>(i) + 1;
      break;
    }
  return c;
}

void criterion_stalking() {
  const auto base = stalk("stalking-baseline");
  const auto none = stalk("stalking-none");
  const auto tad = stalk("stalking-tad");
  const auto tadrp = stalk("stalking-tadrp");
  const bool order = none.final_quarter > tad.final_quarter && tad.final_quarter >= tadrp.final_quarter;
  const bool near = std::abs(tadrp.final_quarter - base.final_quarter) <= kStalkBaselineGap;
  const bool faster = tadrp.converged_at < tad.converged_at;
  report(5, order && near && faster,
         fmt::format("final quarter: baseline {:.2f}, none {:.2f}, TAD {:.2f}, TAD+RP {:.2f} m; "
                     "ordering: {}; TAD+RP within {} m of baseline: {}; ticks to {:.0f}% band "
                     "TAD+RP {} vs TAD {}: {}",
                     base.final_quarter, none.final_quarter, tad.final_quarter, tadrp.final_quarter,
                     order ? "ok" : "no", kStalkBaselineGap, near ? "ok" : "no", kConvergeBand * 100,
                     tadrp.converged_at, tad.converged_at, faster ? "ok" : "no"));
}

// Compact deterministic property checks; the unit suite covers the same
// properties in more depth.
void criterion_properties() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2024);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  std::vector<std::string> failed;

  RangingChannel ch;
  double rt = 0.0;
  for (double d = 0.1; d < 500.0; d *= 1.1)
    rt = std::max(rt, std::abs(invert_rssi(ch, rssi_at_distance(ch, d)) - d) / std::max(1.0, d));
  if (rt > 1e-9) failed.push_back("path-loss round trip");

  double ls_err = 0.0, admm_gap = 0.0, fd_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 target(u(rng), u(rng), u(rng));
    ObservationSet obs;
    for (UavId i = 0; i < 30; ++i) {
      const Vec3 a(u(rng), u(rng), u(rng));
      obs.reports.push_back({i, a, 0.0, (a - target).norm()});
    }
    const Vec3 ls = localize_ls(obs);
    ls_err = std::max(ls_err, (ls - target).norm());
    admm_gap = std::max(admm_gap, (localize_l1_admm(obs, AdmmConfig{}) - ls).norm());
    const Vec3 p(u(rng), u(rng), u(rng));
    const Vec3 g = gd_gradient(obs, p);
    for (int k = 0; k < 3; ++k) {
      Vec3 a = p, b = p;
      a[k] += 1e-5;
      b[k] -= 1e-5;
      const double fd = (gd_cost(obs, a) - gd_cost(obs, b)) / 2e-5;
      fd_err = std::max(fd_err, std::abs(fd - g[k]) / std::max(1.0, std::abs(g[k])));
    }
  }
  if (ls_err > 1e-6) failed.push_back("LS exact recovery");
  if (admm_gap > 1e-3) failed.push_back("ADMM vs LS");
  if (fd_err > 1e-5) failed.push_back("GD gradient");

  std::uniform_real_distribution<double> pos(0.01, 50.0);
  double w_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> s(1 + trial % 40);
    for (auto& x : s) x = pos(rng);
    double recip = 0.0;
    for (double w : error_weights(s)) recip += 1.0 / w;
    w_err = std::max(w_err, std::abs(recip - static_cast<double>(s.size())) / static_cast<double>(s.size()));
  }
  if (w_err > 1e-12) failed.push_back("weight reciprocals");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool clamped = true;
  for (bool printed : {false, true}) {
    TadConfig tc;
    tc.printed_update = printed;
    for (int seq = 0; seq < 10000; ++seq) {
      double r = unit(rng);
      for (int k = 0; k < 1 + seq % 50; ++k) {
        r = reputation_step(r, unit(rng) < 0.5 ? tc.penalty : tc.reward, tc);
        clamped = clamped && r >= 0.0 && r <= 1.0;
      }
    }
  }
  if (!clamped) failed.push_back("reputation clamp");

  const CoordinatedStrategy coord{50, centered_window_start(100, 50)};
  int coord_steps = 0;
  for (int t = 1; t <= 100; ++t) coord_steps += attack_active(coord, 0, 0, t, rng) ? 1 : 0;
  double random_steps = 0.0;
  const int links = 4000;
  for (int l = 0; l < links; ++l)
    for (int t = 1; t <= 100; ++t) random_steps += attack_active(RandomStrategy{0.5}, 0, 0, t, rng) ? 1 : 0;
  random_steps /= links;
  if (coord_steps != 50 || std::abs(random_steps - 50.0) > 4.0 * 5.0 / std::sqrt(double(links)))
    failed.push_back("attack budget parity");

  auto cfg = make_preset("setup2-coord-bias-tad-30");
  cfg.defense.rp = true;
  cfg.horizon = 20;
  cfg.attacker.strategy = CoordinatedStrategy{10, 0};
  cfg.repetitions = 4;
  RunOptions one;
  one.converter = converter();
  RunOptions many = one;
  many.parallelism = 4;
  if (run_scenario(cfg, one).records != run_scenario(cfg, many).records)
    failed.push_back("bit-identical reruns");

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string detail = failed.empty() ? "all property checks hold" : "failed:";
  for (const auto& f : failed) detail += " " + f + ";";
  report(6, failed.empty() && secs < 60.0,
         fmt::format("{} (round trip {:.1e}, LS {:.1e}, ADMM gap {:.1e}, FD {:.1e}, weights {:.1e}, "
                     "coord {} vs random {:.2f} steps) in {:.1f} s",
                     detail, rt, ls_err, admm_gap, fd_err, w_err, coord_steps, random_steps, secs));
}

}  // namespace

int main() {
  try {
    criterion_setup1();
    criterion_geometry();
    const auto t = run_setup2();
    criterion_setup2(t);
    criterion_tad_no_harm(t);
    criterion_stalking();
    criterion_properties();
  } catch (const std::exception& e) {
    fmt::print("[FAIL] acceptance aborted: {}\n", e.what());
    return 1;
  }
  fmt::print("{} of 6 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
