#pragma once

#include "swarmloc/channel.hpp"
#include "swarmloc/common.hpp"
#include "swarmloc/defense.hpp"
#include "swarmloc/localizers.hpp"
#include "swarmloc/magd.hpp"
#include "swarmloc/threat.hpp"

#include <cstdint>
#include <string>

namespace swarmloc {

enum class Layout {
  kMap,     // every UAV roams the whole map
  kEscort,  // one target roams the map; anchors roam a box that travels with it
};

enum class Placement {
  kUniform,     // uniform in the map volume, first destination uniform
  kStationary,  // drawn from the random-waypoint steady state
};

enum class Solver { kMagd, kGd, kLs, kL1Admm };

enum class ReputationSharing {
  kHonest,  // malicious targets upload their true table
  kInvert,  // malicious targets upload 1 - r
};

struct DefenseConfig {
  bool tad = false;
  bool rp = false;
  TadConfig tad_params;
  PropagationFn propagation = PropagationFn::kSquare;
  ReputationSharing malicious_sharing = ReputationSharing::kInvert;
};

struct ScenarioConfig {
  std::string name = "custom";
  Layout layout = Layout::kMap;
  Placement placement = Placement::kStationary;
  Vec3 map_size = Vec3(300.0, 300.0, 10.0);
  Vec3 escort_half_extent = Vec3::Constant(50.0 / std::sqrt(3.0));

  int n_anchors = 100;
  int n_targets = 10;
  double speed_min = 0.3;  // m/s
  double speed_max = 1.7;
  int speed_redraw_period = 0;  // ticks, 0 = speeds fixed
  PositionNoiseModel position_noise;
  bool target_sigma_is_anchor_max = true;

  int horizon = 100;  // T, 1 s per tick
  double range = 50.0;
  double stop_radius = 1.0;  // stalkers hold position inside this radius

  RangingChannel channel;
  Solver solver = Solver::kMagd;
  MagdConfig magd;
  AdmmConfig admm;
  GdConfig gd;

  AttackerConfig attacker;
  int victim_index = 0;  // index among targets
  DefenseConfig defense;

  std::uint64_t seed = 1;
  int repetitions = 1;

  void validate() const;
};

}  // namespace swarmloc
