#include "swarmloc/world.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace swarmloc {
namespace {

double draw_speed(const ScenarioConfig& cfg, Rng& rng) {
  if (cfg.speed_min == cfg.speed_max) return cfg.speed_min;
  std::uniform_real_distribution<double> u(cfg.speed_min, cfg.speed_max);
  return u(rng);
}

Vec3 uniform_in(const Vec3& lo, const Vec3& hi, Rng& rng) {
  Vec3 p;
  for (int k = 0; k < 3; ++k) {
    std::uniform_real_distribution<double> u(lo[k], hi[k]);
    p[k] = lo[k] == hi[k] ? lo[k] : u(rng);
  }
  return p;
}

// Position and current waypoint drawn from the random-waypoint steady state:
// legs are picked with probability proportional to their length and the
// position is uniform along the leg.
std::pair<Vec3, Vec3> stationary_leg(const Vec3& lo, const Vec3& hi, Rng& rng) {
  const double max_len = (hi - lo).norm();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const Vec3 a = uniform_in(lo, hi, rng);
    const Vec3 b = uniform_in(lo, hi, rng);
    if (u(rng) * max_len <= (b - a).norm()) return {a + u(rng) * (b - a), b};
  }
}

std::pair<Vec3, Vec3> initial_leg(Placement placement, const Vec3& lo, const Vec3& hi, Rng& rng) {
  if (placement == Placement::kStationary) return stationary_leg(lo, hi, rng);
  const Vec3 p = uniform_in(lo, hi, rng);
  return {p, uniform_in(lo, hi, rng)};
}

Vec3 clamp_box(const Vec3& p, const Vec3& lo, const Vec3& hi) {
  return p.cwiseMax(lo).cwiseMin(hi);
}

// Moves `pos` toward `dest` by at most `speed`. Returns true on arrival.
bool advance(Vec3& pos, const Vec3& dest, double speed) {
  const Vec3 delta = dest - pos;
  const double dist = delta.norm();
  if (dist <= speed) {
    pos = dest;
    return true;
  }
  pos += delta * (speed / dist);
  return false;
}

}  // namespace

std::size_t WorldState::first_target() const {
  for (std::size_t i = 0; i < uavs.size(); ++i)
    if (uavs[i].role == Role::kTarget) return i;
  return uavs.size();
}

std::vector<UavId> WorldState::target_ids() const {
  std::vector<UavId> ids;
  for (const auto& u : uavs)
    if (u.role == Role::kTarget) ids.push_back(u.id);
  return ids;
}

Vec3 uniform_in_box(const Vec3& size, Rng& rng) { return uniform_in(Vec3::Zero(), size, rng); }

WorldState init_world(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto& atk = cfg.attacker;
  const bool stalking = std::holds_alternative<StalkingStrategy>(atk.strategy);
  if (atk.n_malicious > cfg.n_anchors)
    throw ConfigError("attacker.n_malicious exceeds the anchor fleet");
  const int eligible_targets = cfg.n_targets - (stalking ? 1 : 0);
  if (atk.n_malicious_targets > std::max(eligible_targets, 0))
    throw ConfigError("attacker.n_malicious_targets exceeds the eligible targets");

  WorldState w;
  const auto n_total = static_cast<std::size_t>(cfg.n_anchors + cfg.n_targets);
  w.uavs.resize(n_total);
  const Vec3 lo = Vec3::Zero();
  const Vec3 hi = cfg.map_size;

  double max_anchor_sigma = 0.0;
  for (std::size_t i = 0; i < n_total; ++i) {
    auto& u = w.uavs[i];
    u.id = static_cast<UavId>(i);
    u.role = static_cast<int>(i) < cfg.n_anchors ? Role::kAnchor : Role::kTarget;
    u.sigma_p = cfg.position_noise.draw(rng);
    u.speed = draw_speed(cfg, rng);
    if (u.role == Role::kAnchor) max_anchor_sigma = std::max(max_anchor_sigma, u.sigma_p);
  }
  if (cfg.target_sigma_is_anchor_max && cfg.n_anchors > 0)
    for (auto& u : w.uavs)
      if (u.role == Role::kTarget) u.sigma_p = max_anchor_sigma;

  if (cfg.layout == Layout::kMap) {
    for (auto& u : w.uavs) std::tie(u.true_pos, u.destination) = initial_leg(cfg.placement, lo, hi, rng);
  } else {
    auto& target = w.uavs[static_cast<std::size_t>(cfg.n_anchors)];
    std::tie(target.true_pos, target.destination) = initial_leg(cfg.placement, lo, hi, rng);
    const Vec3 h = cfg.escort_half_extent;
    for (int i = 0; i < cfg.n_anchors; ++i) {
      auto [off, dest] = initial_leg(cfg.placement, -h, h, rng);
      w.escort_offset.push_back(off);
      w.escort_destination.push_back(dest);
      w.escort_speed.push_back(w.uavs[static_cast<std::size_t>(i)].speed);
      auto& a = w.uavs[static_cast<std::size_t>(i)];
      a.true_pos = target.true_pos + off;
      a.destination = target.true_pos + dest;
    }
  }

  // Malicious anchors: uniform subset.
  std::vector<UavId> anchor_ids(static_cast<std::size_t>(cfg.n_anchors));
  std::iota(anchor_ids.begin(), anchor_ids.end(), 0U);
  std::shuffle(anchor_ids.begin(), anchor_ids.end(), rng);
  for (int i = 0; i < atk.n_malicious; ++i) w.uavs[anchor_ids[static_cast<std::size_t>(i)]].malicious = true;

  const auto first_target = static_cast<UavId>(cfg.n_anchors);
  if (stalking) w.victim = first_target + static_cast<UavId>(cfg.victim_index);
  std::vector<UavId> target_pool;
  for (int i = 0; i < cfg.n_targets; ++i) {
    const UavId id = first_target + static_cast<UavId>(i);
    if (!w.victim || id != *w.victim) target_pool.push_back(id);
  }
  std::shuffle(target_pool.begin(), target_pool.end(), rng);
  for (int i = 0; i < atk.n_malicious_targets; ++i)
    w.uavs[target_pool[static_cast<std::size_t>(i)]].malicious = true;

  if (w.victim)
    for (auto& u : w.uavs)
      if (u.malicious) u.destination = stalk_waypoint(w.uavs[*w.victim].true_pos);
  return w;
}

void step_mobility(WorldState& world, const ScenarioConfig& cfg, Rng& rng) {
  const int next_t = world.t + 1;
  if (cfg.speed_redraw_period > 0 && next_t > 1 && (next_t - 1) % cfg.speed_redraw_period == 0) {
    for (auto& u : world.uavs) u.speed = draw_speed(cfg, rng);
    for (std::size_t i = 0; i < world.escort_speed.size(); ++i)
      world.escort_speed[i] = world.uavs[i].speed;
  }

  const Vec3 lo = Vec3::Zero();
  const Vec3 hi = cfg.map_size;

  if (cfg.layout == Layout::kEscort) {
    auto& target = world.uavs[static_cast<std::size_t>(cfg.n_anchors)];
    if (advance(target.true_pos, target.destination, target.speed))
      target.destination = uniform_in(lo, hi, rng);
    target.true_pos = clamp_box(target.true_pos, lo, hi);
    const Vec3 h = cfg.escort_half_extent;
    for (std::size_t i = 0; i < world.escort_offset.size(); ++i) {
      if (advance(world.escort_offset[i], world.escort_destination[i], world.escort_speed[i]))
        world.escort_destination[i] = uniform_in(-h, h, rng);
      world.escort_offset[i] = clamp_box(world.escort_offset[i], -h, h);
      world.uavs[i].true_pos = target.true_pos + world.escort_offset[i];
      world.uavs[i].destination = target.true_pos + world.escort_destination[i];
    }
    return;
  }

  // Stalkers aim at where the victim is at the start of the tick.
  const std::optional<Vec3> victim_pos =
      world.victim ? std::optional<Vec3>(world.uavs[*world.victim].true_pos) : std::nullopt;
  for (auto& u : world.uavs) {
    if (u.malicious && victim_pos) {
      u.destination = stalk_waypoint(*victim_pos);
      const double dist = (u.destination - u.true_pos).norm();
      if (dist > cfg.stop_radius) advance(u.true_pos, u.destination, std::min(u.speed, dist - cfg.stop_radius));
    } else if (advance(u.true_pos, u.destination, u.speed)) {
      u.destination = uniform_in(lo, hi, rng);
    }
    u.true_pos = clamp_box(u.true_pos, lo, hi);
  }
}

std::vector<UavId> neighbors_in_range(const WorldState& world, UavId target, double range) {
  if (!(range > 0.0)) throw DomainError("neighbors_in_range: range must be > 0");
  std::vector<UavId> out;
  const Vec3& p = world.uavs[target].true_pos;
  for (const auto& u : world.uavs) {
    if (u.id == target) continue;
    const double d = (u.true_pos - p).norm();
    if (d > 0.0 && d <= range) out.push_back(u.id);
  }
  return out;
}

}  // namespace swarmloc
