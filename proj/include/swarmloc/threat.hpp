#pragma once

#include "swarmloc/common.hpp"
#include "swarmloc/observation.hpp"

#include <string>
#include <variant>

namespace swarmloc {

/// Noise on everything: position, range (one-sided) and reported sigma_p.
struct JammingAttack {
  double index = 5.0;  // sigma_J^2
};

/// Constant offset added to the reported position.
struct BiasAttack {
  Vec3 bias = Vec3(200.0, 200.0, 5.0);
};

/// Extra position error with an understated reported sigma_p.
struct ManipulationAttack {
  double index = 200.0;  // sigma_M^2
};

/// Malicious UAVs move like attackers but report honestly. Used for the
/// stalking baseline.
struct NoAttack {};

using AttackMode = std::variant<NoAttack, JammingAttack, BiasAttack, ManipulationAttack>;

struct RandomStrategy {
  double rate = 0.5;
};

struct CoordinatedStrategy {
  int window = 50;  // T_a
  int start = 0;    // first active timestep; 0 places the window centrally
};

struct StalkingStrategy {
  UavId victim = 0;
};

using AttackStrategy = std::variant<RandomStrategy, CoordinatedStrategy, StalkingStrategy>;

struct AttackerConfig {
  int n_malicious = 0;          // drawn among anchors
  int n_malicious_targets = 0;  // targets that also attack and share inverted reputations
  AttackMode mode = NoAttack{};
  AttackStrategy strategy = RandomStrategy{};

  bool enabled() const { return n_malicious + n_malicious_targets > 0; }
  void validate(int horizon) const;
};

/// Start of a window of length `window` centered in [1, horizon].
int centered_window_start(int horizon, int window);

bool attack_active(const AttackStrategy& strategy, UavId attacker, UavId target, int t, Rng& rng);

AnchorReport tamper_report(const AttackMode& mode, const AnchorReport& honest, Rng& rng);

/// Stalkers aim at the victim's true position every tick.
Vec3 stalk_waypoint(const Vec3& victim_true_pos);

std::string mode_name(const AttackMode& mode);
std::string strategy_name(const AttackStrategy& strategy);

}  // namespace swarmloc
