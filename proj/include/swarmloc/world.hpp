#pragma once

#include "swarmloc/common.hpp"
#include "swarmloc/observation.hpp"
#include "swarmloc/scenario.hpp"

#include <optional>
#include <vector>

namespace swarmloc {

/// Ground truth of one repetition. Anchors occupy ids [0, n_anchors),
/// targets follow.
struct WorldState {
  std::vector<UavState> uavs;
  // Escort layout only: anchor offsets from the target and their waypoints.
  std::vector<Vec3> escort_offset;
  std::vector<Vec3> escort_destination;
  std::vector<double> escort_speed;
  int t = 0;
  std::optional<UavId> victim;  // set when the strategy is stalking

  std::size_t first_target() const;
  std::vector<UavId> target_ids() const;
};

/// Places the fleet, draws per-UAV sigma_p and speeds and picks the
/// malicious subset. Throws ConfigError when the malicious counts exceed
/// the fleet.
WorldState init_world(const ScenarioConfig& cfg, Rng& rng);

/// One second of random-waypoint motion; stalkers re-aim at the victim.
void step_mobility(WorldState& world, const ScenarioConfig& cfg, Rng& rng);

/// Every other UAV whose true distance to `target` is within `range`.
std::vector<UavId> neighbors_in_range(const WorldState& world, UavId target, double range);

/// Uniform point in the box [0, size].
Vec3 uniform_in_box(const Vec3& size, Rng& rng);

}  // namespace swarmloc
