#include "swarmloc/scenario.hpp"

namespace swarmloc {

void ScenarioConfig::validate() const {
  if (!(map_size.minCoeff() >= 0.0) || !map_size.allFinite())
    throw ConfigError("map_size must be finite and >= 0");
  if (!(escort_half_extent.minCoeff() >= 0.0)) throw ConfigError("escort_half_extent must be >= 0");
  if (n_anchors < 0) throw ConfigError("n_anchors must be >= 0");
  if (n_targets < 1) throw ConfigError("n_targets must be >= 1");
  if (layout == Layout::kEscort && n_targets != 1) throw ConfigError("escort layout supports one target");
  if (!(speed_min >= 0.0) || !(speed_max >= speed_min))
    throw ConfigError("speed range: require 0 <= speed_min <= speed_max");
  if (speed_redraw_period < 0) throw ConfigError("speed_redraw_period must be >= 0");
  position_noise.validate();
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!(range > 0.0)) throw ConfigError("range must be > 0");
  if (!(stop_radius >= 0.0)) throw ConfigError("stop_radius must be >= 0");
  channel.validate();
  magd.validate();
  admm.validate();
  gd.validate();
  attacker.validate(horizon);
  if (std::holds_alternative<StalkingStrategy>(attacker.strategy)) {
    if (layout != Layout::kMap) throw ConfigError("stalking requires the map layout");
    if (victim_index < 0 || victim_index >= n_targets) throw ConfigError("victim_index out of range");
  }
  defense.tad_params.validate();
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
}

}  // namespace swarmloc
