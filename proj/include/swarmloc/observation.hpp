#pragma once

#include "swarmloc/channel.hpp"
#include "swarmloc/common.hpp"

#include <vector>

namespace swarmloc {

enum class Role { kAnchor, kTarget };

struct UavState {
  UavId id = 0;
  Vec3 true_pos = Vec3::Zero();
  double sigma_p = 0.0;  // drawn once at init
  double speed = 0.0;    // m/s
  Vec3 destination = Vec3::Zero();
  Role role = Role::kAnchor;
  bool malicious = false;
};

/// One anchor's broadcast as received by a target.
struct AnchorReport {
  UavId anchor_id = 0;
  Vec3 reported_pos = Vec3::Zero();
  double reported_sigma_p = 0.0;
  double measured_distance = 0.0;
};

struct ObservationSet {
  UavId target_id = 0;
  std::vector<AnchorReport> reports;

  std::size_t size() const { return reports.size(); }
  bool empty() const { return reports.empty(); }
};

/// Honest report from `anchor` as measured by a target at `target_true_pos`.
AnchorReport observe(const UavState& anchor, const Vec3& target_true_pos,
                     const RangingChannel& ch, Rng& rng);

}  // namespace swarmloc
