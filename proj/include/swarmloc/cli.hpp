#pragma once

#include "swarmloc/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace swarmloc {

inline constexpr const char* kToolVersion = "0.1.0";

/// A list of (dotted field path, values) pairs; cells are the cross product.
struct SweepSpec {
  std::vector<std::pair<std::string, std::vector<nlohmann::json>>> axes;
  std::size_t cell_count() const;
};

/// Accepts either a JSON object file {"a.b": [v, ...]} or the inline form
/// "a.b=v1,v2;c=v3". Throws ConfigError on empty axes.
SweepSpec parse_sweep(const std::string& text_or_path);

/// Sets one field of the canonical config JSON. Unknown paths throw
/// ConfigError naming the path.
ScenarioConfig apply_field(const ScenarioConfig& cfg, const std::string& path, const nlohmann::json& value);

/// Cell `index` of the sweep in row-major order (last axis fastest).
std::vector<nlohmann::json> sweep_cell(const SweepSpec& spec, std::size_t index);

struct RunManifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  std::uint64_t sigma_d_seed = 0;
  std::vector<std::string> outputs;
  double duration_s = 0.0;
  nlohmann::json to_json() const;
};

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::filesystem::path out_dir = "out";
  int parallelism = 1;
  bool trace_reputation = false;
};

/// Output directory after the SWARMLOC_OUT override.
std::filesystem::path resolve_out_dir(const std::filesystem::path& requested);

/// Loads --config or --preset and applies --seed / --reps.
ScenarioConfig load_config(const CommonOptions& opt);

int cmd_run(const CommonOptions& opt);
int cmd_sweep(const CommonOptions& opt, const std::string& sweep);
int cmd_export_channel(const CommonOptions& opt, const std::filesystem::path& out_csv);
int cmd_bench_geometry(const CommonOptions& opt);
int cmd_bench_stepsize(const CommonOptions& opt);
int cmd_write_presets(const std::filesystem::path& dir);

/// Entry point shared by the executable and the tests.
int cli_main(int argc, char** argv);

}  // namespace swarmloc
