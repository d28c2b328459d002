#include "swarmloc/threat.hpp"

#include <algorithm>
#include <cmath>

namespace swarmloc {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void AttackerConfig::validate(int horizon) const {
  if (n_malicious < 0 || n_malicious_targets < 0)
    throw ConfigError("attacker: malicious counts must be >= 0");
  std::visit(Overloaded{
                 [](const NoAttack&) {},
                 [](const JammingAttack& j) {
                   if (!(j.index > 0.0)) throw ConfigError("attacker.jamming_index must be > 0");
                 },
                 [](const BiasAttack& b) {
                   if (!b.bias.allFinite()) throw ConfigError("attacker.bias must be finite");
                 },
                 [](const ManipulationAttack& m) {
                   if (!(m.index > 0.0)) throw ConfigError("attacker.manipulation_index must be > 0");
                 },
             },
             mode);
  std::visit(Overloaded{
                 [](const RandomStrategy& r) {
                   if (!(r.rate >= 0.0 && r.rate <= 1.0))
                     throw ConfigError("attacker.rate must be in [0, 1]");
                 },
                 [horizon](const CoordinatedStrategy& c) {
                   if (c.window < 1 || c.window > horizon)
                     throw ConfigError("attacker.window must be in [1, T]");
                   if (c.start < 0 || c.start > horizon)
                     throw ConfigError("attacker.start must be in [0, T] (0 = centered)");
                 },
                 [](const StalkingStrategy&) {},
             },
             strategy);
}

int centered_window_start(int horizon, int window) { return (horizon - window) / 2 + 1; }

bool attack_active(const AttackStrategy& strategy, UavId /*attacker*/, UavId target, int t,
                   Rng& rng) {
  return std::visit(Overloaded{
                        [&](const RandomStrategy& r) {
                          std::bernoulli_distribution b(r.rate);
                          return b(rng);
                        },
                        [&](const CoordinatedStrategy& c) {
                          if (c.start < 1) throw ConfigError("coordinated window start unresolved");
                          return t >= c.start && t < c.start + c.window;
                        },
                        [&](const StalkingStrategy& s) { return target == s.victim; },
                    },
                    strategy);
}

AnchorReport tamper_report(const AttackMode& mode, const AnchorReport& honest, Rng& rng) {
  AnchorReport r = honest;
  std::visit(Overloaded{
                 [](const NoAttack&) {},
                 [&](const JammingAttack& j) {
                   const double sigma_j = std::sqrt(j.index);
                   std::normal_distribution<double> n(0.0, sigma_j / std::sqrt(3.0));
                   const double dx = n(rng);
                   const double dy = n(rng);
                   const double dz = n(rng);
                   r.reported_pos += Vec3(dx, dy, dz);
                   std::uniform_real_distribution<double> u(0.0, j.index);
                   r.measured_distance = std::max(0.0, r.measured_distance + u(rng));
                   r.reported_sigma_p += sigma_j;
                 },
                 [&](const BiasAttack& b) { r.reported_pos += b.bias; },
                 [&](const ManipulationAttack& m) {
                   const double half = m.index / 3.0;
                   std::uniform_real_distribution<double> u(-half, half);
                   const double dx = u(rng);
                   const double dy = u(rng);
                   const double dz = u(rng);
                   r.reported_pos += Vec3(dx, dy, dz);
                   r.reported_sigma_p = 1.0 / std::sqrt(m.index);
                 },
             },
             mode);
  return r;
}

Vec3 stalk_waypoint(const Vec3& victim_true_pos) { return victim_true_pos; }

std::string mode_name(const AttackMode& mode) {
  return std::visit(Overloaded{
                        [](const NoAttack&) { return std::string("none"); },
                        [](const JammingAttack&) { return std::string("jamming"); },
                        [](const BiasAttack&) { return std::string("bias"); },
                        [](const ManipulationAttack&) { return std::string("manipulation"); },
                    },
                    mode);
}

std::string strategy_name(const AttackStrategy& strategy) {
  return std::visit(Overloaded{
                        [](const RandomStrategy&) { return std::string("random"); },
                        [](const CoordinatedStrategy&) { return std::string("coordinated"); },
                        [](const StalkingStrategy&) { return std::string("stalking"); },
                    },
                    strategy);
}

}  // namespace swarmloc
