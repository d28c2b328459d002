#pragma once

#include "swarmloc/scenario.hpp"

#include <string>
#include <vector>

namespace swarmloc {

/// Escort scenario with one mobile target and n_a anchors (Setup 1).
ScenarioConfig setup1_preset(int n_anchors = 20);

/// Map scenario with 100 anchors and 10 targets, no attack (Setup 2).
ScenarioConfig setup2_preset();

/// Builds a named preset. Recognized names:
///   setup1
///   setup2-none, setup2-none-tad
///   setup2-<coord|random>-<bias|mani|jam>[-tad]-<n_malicious>
///   stalking-<baseline|none|tad|tadrp>
/// Throws ConfigError for anything else.
ScenarioConfig make_preset(const std::string& name);

/// Names of the presets shipped as files.
std::vector<std::string> committed_preset_names();

}  // namespace swarmloc
