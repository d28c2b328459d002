#pragma once

#include "swarmloc/scenario.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace swarmloc {

/// Canonical JSON form of a scenario. Every field is written, so the output
/// is self-describing and stable across runs.
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

/// Strict reader: absent keys keep their defaults, unknown keys and type
/// mismatches raise ConfigError naming the offending field path.
ScenarioConfig scenario_from_json(const nlohmann::json& j);

ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path);

/// FNV-1a over the canonical serialization, as 16 hex digits.
std::string config_hash(const ScenarioConfig& cfg);

}  // namespace swarmloc
