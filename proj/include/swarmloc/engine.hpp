#pragma once

#include "swarmloc/defense.hpp"
#include "swarmloc/localizers.hpp"
#include "swarmloc/magd.hpp"
#include "swarmloc/scenario.hpp"
#include "swarmloc/world.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace swarmloc {

struct MetricsRecord {
  int rep = 0;
  int t = 0;
  UavId target = 0;
  double err = 0.0;  // |p_hat - p|, m
  Vec3 p_hat = Vec3::Zero();
  Vec3 true_pos = Vec3::Zero();
  int n_in_range = 0;
  double alpha_hat = 0.0;
  double d_bar = 0.0;
  bool coasting = false;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

struct ReputationTraceRecord {
  int rep = 0;
  int t = 0;
  UavId owner = 0;
  UavId neighbor = 0;
  double r = 0.0;        // local reputation after this tick's update
  double r_blend = 0.0;  // value handed to the estimator this tick

  friend bool operator==(const ReputationTraceRecord&, const ReputationTraceRecord&) = default;
};

/// Fills in derived fields: the coordinated window start (centered when 0)
/// and the stalking victim id. Idempotent.
ScenarioConfig resolve_scenario(ScenarioConfig cfg);

/// One repetition of a scenario. The pipeline per tick is: move, then for
/// each target in id order observe, tamper, blend reputations, estimate,
/// score neighbors and stage an upload. Uploads become visible to readers
/// at the next tick.
class Simulation {
 public:
  Simulation(const ScenarioConfig& cfg, std::shared_ptr<const ErrorConverter> converter,
             std::uint64_t rep_seed, int rep = 0, bool trace_reputation = false);

  std::vector<MetricsRecord> tick();
  std::vector<MetricsRecord> run();

  const WorldState& world() const { return world_; }
  const ScenarioConfig& config() const { return cfg_; }
  const std::vector<ReputationTraceRecord>& reputation_trace() const { return trace_; }
  const ReputationTable& reputation_of(UavId target) const;
  const CloudRegistry& cloud() const { return cloud_; }

 private:
  struct TargetState {
    UavId id = 0;
    MagdState magd;
    ReputationTable reputation;
  };

  Vec3 estimate_with_baseline(TargetState& ts, const ObservationSet& trusted, bool& coasting);

  ScenarioConfig cfg_;
  std::shared_ptr<const ErrorConverter> converter_;
  int rep_ = 0;
  bool trace_enabled_ = false;
  Rng mobility_rng_;
  Rng measure_rng_;
  Rng attack_rng_;
  WorldState world_;
  std::vector<TargetState> targets_;
  CloudRegistry cloud_;
  std::vector<ReputationTraceRecord> trace_;
};

struct ErrorSummary {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

ErrorSummary summarize(const std::vector<MetricsRecord>& records);

struct ScenarioResult {
  std::vector<MetricsRecord> records;  // ordered by (rep, t, target)
  std::vector<ReputationTraceRecord> reputation_trace;
  ErrorSummary summary;
  std::optional<UavId> victim;
  std::uint64_t sigma_d_seed = 0;
};

struct RunOptions {
  int parallelism = 1;
  bool trace_reputation = false;
  std::uint64_t cell = 0;  // stream index within a sweep
  std::shared_ptr<const ErrorConverter> converter;  // built from cfg.channel when null
};

/// The sigma_d table is derived once per channel from kSigmaDTableSeed.
std::shared_ptr<const ErrorConverter> make_converter(const RangingChannel& ch);

/// Runs cfg.repetitions repetitions; repetition r uses
/// derive_seed(cfg.seed, options.cell, r) regardless of scheduling.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {});

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRecord>& records,
                       const std::string& run_id);
void write_reputation_csv(std::ostream& os, const std::vector<ReputationTraceRecord>& records);

/// Runs `count` jobs on up to `parallelism` threads.
void parallel_for(std::size_t count, int parallelism, const std::function<void(std::size_t)>& job);

}  // namespace swarmloc
