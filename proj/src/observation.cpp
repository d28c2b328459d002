#include "swarmloc/observation.hpp"

namespace swarmloc {

AnchorReport observe(const UavState& anchor, const Vec3& target_true_pos,
                     const RangingChannel& ch, Rng& rng) {
  const double d = (target_true_pos - anchor.true_pos).norm();
  if (!(d > 0.0)) throw DegenerateGeometryError("observe: target coincides with anchor");
  AnchorReport r;
  r.anchor_id = anchor.id;
  r.reported_pos = anchor.true_pos + sample_position_offset(anchor.sigma_p, rng);
  r.measured_distance = measure_distance(ch, d, rng);
  r.reported_sigma_p = anchor.sigma_p;
  return r;
}

}  // namespace swarmloc
