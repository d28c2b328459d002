#include "swarmloc/presets.hpp"

#include <charconv>

#include <fmt/format.h>

namespace swarmloc {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  for (;;) {
    const auto next = s.find(sep, pos);
    parts.push_back(s.substr(pos, next - pos));
    if (next == std::string::npos) return parts;
    pos = next + 1;
  }
}

int parse_count(const std::string& s, const std::string& name) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
    throw ConfigError(fmt::format("preset {}: bad malicious count \"{}\"", name, s));
  return v;
}

ScenarioConfig stalking_preset(const std::string& variant, const std::string& name) {
  ScenarioConfig c = setup2_preset();
  c.name = name;
  // 30 malicious UAVs in the 110-UAV fleet, 3 of them targets.
  c.attacker.n_malicious = 27;
  c.attacker.n_malicious_targets = 3;
  c.repetitions = 20;
  c.attacker.mode = BiasAttack{};
  c.attacker.strategy = StalkingStrategy{};
  c.victim_index = 0;
  if (variant == "baseline") {
    c.attacker.mode = NoAttack{};
  } else if (variant == "none") {
  } else if (variant == "tad") {
    c.defense.tad = true;
  } else if (variant == "tadrp") {
    c.defense.tad = true;
    c.defense.rp = true;
  } else {
    throw ConfigError(fmt::format("unknown preset \"{}\"", name));
  }
  return c;
}

}  // namespace

ScenarioConfig setup1_preset(int n_anchors) {
  ScenarioConfig c;
  c.name = "setup1";
  c.layout = Layout::kEscort;
  c.n_anchors = n_anchors;
  c.n_targets = 1;
  c.speed_min = 0.6;
  c.speed_max = 3.4;
  c.speed_redraw_period = 10;
  c.horizon = 50;
  c.range = 50.0;
  c.escort_half_extent = Vec3::Constant(50.0 / std::sqrt(3.0));
  c.magd = MagdConfig{};
  c.seed = 1;
  c.repetitions = 20;
  return c;
}

ScenarioConfig setup2_preset() {
  ScenarioConfig c;
  c.name = "setup2-none";
  c.layout = Layout::kMap;
  c.map_size = Vec3(300.0, 300.0, 10.0);
  c.n_anchors = 100;
  c.n_targets = 10;
  c.speed_min = 0.3;
  c.speed_max = 1.7;
  c.horizon = 100;
  c.range = 50.0;
  c.seed = 2;
  c.repetitions = 10;
  return c;
}

ScenarioConfig make_preset(const std::string& name) {
  if (name == "setup1") return setup1_preset();
  const auto parts = split(name, '-');
  if (parts.size() == 2 && parts[0] == "stalking") return stalking_preset(parts[1], name);
  if (parts.empty() || parts[0] != "setup2") throw ConfigError(fmt::format("unknown preset \"{}\"", name));

  ScenarioConfig c = setup2_preset();
  c.name = name;
  if (parts.size() == 2 && parts[1] == "none") return c;
  if (parts.size() == 3 && parts[1] == "none" && parts[2] == "tad") {
    c.defense.tad = true;
    return c;
  }
  if (parts.size() != 4 && parts.size() != 5) throw ConfigError(fmt::format("unknown preset \"{}\"", name));

  if (parts[1] == "coord")
    c.attacker.strategy = CoordinatedStrategy{};
  else if (parts[1] == "random")
    c.attacker.strategy = RandomStrategy{};
  else
    throw ConfigError(fmt::format("preset {}: unknown strategy \"{}\"", name, parts[1]));

  if (parts[2] == "bias")
    c.attacker.mode = BiasAttack{};
  else if (parts[2] == "mani")
    c.attacker.mode = ManipulationAttack{};
  else if (parts[2] == "jam")
    c.attacker.mode = JammingAttack{};
  else
    throw ConfigError(fmt::format("preset {}: unknown attack \"{}\"", name, parts[2]));

  if (parts.size() == 5) {
    if (parts[3] != "tad") throw ConfigError(fmt::format("unknown preset \"{}\"", name));
    c.defense.tad = true;
  }
  c.attacker.n_malicious = parse_count(parts.back(), name);
  c.validate();
  return c;
}

std::vector<std::string> committed_preset_names() {
  std::vector<std::string> names = {"setup1", "setup2-none", "setup2-none-tad"};
  for (const char* strat : {"coord", "random"})
    for (const char* mode : {"bias", "mani", "jam"})
      for (const char* tad : {"", "-tad"})
        names.push_back(fmt::format("setup2-{}-{}{}-30", strat, mode, tad));
  for (const char* v : {"baseline", "none", "tad", "tadrp"}) names.push_back(fmt::format("stalking-{}", v));
  return names;
}

}  // namespace swarmloc
