#pragma once

#include "swarmloc/common.hpp"
#include "swarmloc/localizers.hpp"
#include "swarmloc/observation.hpp"

#include <optional>
#include <span>
#include <vector>

namespace swarmloc {

/// Mobility-adaptive gradient descent parameters. Defaults follow the
/// reference setup: thresholds [50, 5] m, discounts [0.5, 0.05], momentum
/// 1e-5, theta 1e-8, K = 30.
struct MagdConfig {
  double eps_max_t0 = 50.0;
  double eps_min_t0 = 5.0;
  double eps_min_t = 5.0;
  double beta1 = 0.5;
  double beta2 = 0.05;
  double momentum = 1e-5;
  double theta = 1e-8;
  int max_iterations = 30;
  int window = 5;  // Phi, timesteps

  // When set, beta1 reductions made inside one tick carry over to the next.
  bool persist_inner_discount = false;

  // Enlargement never pushes the step size above eps_max_t0.
  bool cap_enlargement = true;

  // When set, the step size is reset to this value every tick and no
  // timestep-level adaptation happens (fixed-step baseline).
  std::optional<double> fixed_alpha;

  void validate() const;
};

struct MagdState {
  Vec3 p_hat = Vec3::Zero();
  double alpha_hat = 0.0;
  Vec3 prev_displacement = Vec3::Zero();
  std::vector<double> speed_history;     // V(t)
  std::vector<double> residual_history;  // D-bar(t)
  double mean_speed = 0.0;               // V-bar
  double mean_residual = 0.0;            // D-double-bar
  int t = 0;
  bool initialized = false;
};

MagdState magd_init(const MagdConfig& cfg, std::size_t n_anchors, const Vec3& p_init);

struct InnerDescentResult {
  Vec3 p_hat = Vec3::Zero();
  double d_bar = 0.0;
  int iterations = 0;
  double alpha_end = 0.0;
  Vec3 last_displacement = Vec3::Zero();
};

/// One tick of weighted, reputation-aware descent starting from
/// state.p_hat. Anchors whose reputation or weight is zero are dropped
/// before any arithmetic, so they cannot perturb the trajectory.
InnerDescentResult magd_inner_descent(const MagdState& state, const ObservationSet& obs,
                                      std::span<const ConvertedError> conversions,
                                      std::span<const double> weights,
                                      std::span<const double> reputations,
                                      const MagdConfig& cfg);

/// Records V(t) and D-bar(t) for the new estimate and applies the
/// timestep-level step-size rules. `n_anchors` is the trusted anchor count.
void magd_adapt(MagdState& state, const Vec3& p_new, double d_bar, std::size_t n_anchors,
                const MagdConfig& cfg);

struct MagdTickResult {
  Vec3 p_hat = Vec3::Zero();
  double alpha_hat = 0.0;
  double d_bar = 0.0;
  double speed = 0.0;
  int iterations = 0;
  bool coasting = false;
  std::vector<ConvertedError> conversions;  // one per report
};

/// Full estimator step: error conversion, error weights, inner descent and
/// adaptation. With no report (or no trusted report) the previous estimate
/// is held and the result is flagged as coasting.
MagdTickResult magd_tick(MagdState& state, const ObservationSet& obs,
                         std::span<const double> reputations, const ErrorConverter& converter,
                         const MagdConfig& cfg);

Vec3 centroid_of_reports(const ObservationSet& obs);

}  // namespace swarmloc
