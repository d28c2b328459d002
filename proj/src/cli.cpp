#include "swarmloc/cli.hpp"

#include "swarmloc/benchmarks.hpp"
#include "swarmloc/config_io.hpp"
#include "swarmloc/engine.hpp"
#include "swarmloc/presets.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

namespace swarmloc {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::ios_base::failure(fmt::format("cannot write {}", p.string()));
  return os;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw std::ios_base::failure(fmt::format("cannot create output directory {}", dir.string()));
}

json summary_json(const ScenarioConfig& cfg, const ScenarioResult& res) {
  std::map<UavId, std::vector<double>> per_target;
  for (const auto& r : res.records) per_target[r.target].push_back(r.err);
  json targets = json::array();
  for (const auto& [id, errs] : per_target) {
    double m = 0.0;
    for (double e : errs) m += e;
    targets.push_back({{"target_id", id}, {"mean_err_m", m / static_cast<double>(errs.size())}});
  }
  json j = {{"name", cfg.name},
            {"mean_err_m", res.summary.mean},
            {"std_err_m", res.summary.std},
            {"records", res.summary.count},
            {"repetitions", cfg.repetitions},
            {"targets", targets}};
  if (res.victim) j["victim_id"] = *res.victim;
  return j;
}

void write_manifest(const fs::path& path, RunManifest m) {
  auto os = open_out(path);
  os << m.to_json().dump(2) << '\n';
}

std::string cell_label(const SweepSpec& spec, const std::vector<json>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!s.empty()) s += ' ';
    s += spec.axes[i].first + "=" + (values[i].is_string() ? values[i].get<std::string>() : values[i].dump());
  }
  return s;
}

std::string value_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\n") - b + 1);
}

}  // namespace

std::size_t SweepSpec::cell_count() const {
  std::size_t n = 1;
  for (const auto& [path, values] : axes) n *= values.size();
  return axes.empty() ? 0 : n;
}

SweepSpec parse_sweep(const std::string& text_or_path) {
  SweepSpec spec;
  std::error_code ec;
  if (fs::is_regular_file(text_or_path, ec)) {
    std::ifstream in(text_or_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(fmt::format("sweep {}: {}", text_or_path, e.what()));
    }
    if (!j.is_object()) throw ConfigError("sweep file must hold an object of field -> list");
    for (const auto& [k, v] : j.items()) {
      if (!v.is_array()) throw ConfigError(fmt::format("sweep field {}: expected a list", k));
      spec.axes.emplace_back(k, std::vector<json>(v.begin(), v.end()));
    }
  } else {
    std::size_t pos = 0;
    while (pos <= text_or_path.size()) {
      auto end = text_or_path.find(';', pos);
      if (end == std::string::npos) end = text_or_path.size();
      const std::string part = trim(text_or_path.substr(pos, end - pos));
      pos = end + 1;
      if (part.empty()) continue;
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw ConfigError(fmt::format("sweep axis \"{}\": expected field=v1,v2", part));
      std::vector<json> values;
      std::string rest = part.substr(eq + 1);
      std::size_t p = 0;
      while (p <= rest.size()) {
        auto c = rest.find(',', p);
        if (c == std::string::npos) c = rest.size();
        const std::string v = trim(rest.substr(p, c - p));
        if (!v.empty()) values.push_back(parse_value(v));
        p = c + 1;
      }
      spec.axes.emplace_back(trim(part.substr(0, eq)), std::move(values));
    }
  }
  if (spec.axes.empty()) throw ConfigError("sweep: no axes given");
  for (const auto& [k, v] : spec.axes)
    if (v.empty()) throw ConfigError(fmt::format("sweep field {}: empty value list", k));
  return spec;
}

ScenarioConfig apply_field(const ScenarioConfig& cfg, const std::string& path, const json& value) {
  json j = scenario_to_json(cfg);
  json* node = &j;
  std::size_t pos = 0;
  for (;;) {
    const auto dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (!node->is_object() || !node->contains(key)) throw ConfigError(fmt::format("{}: unknown field", path));
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  *node = value;
  return scenario_from_json(j);
}

std::vector<json> sweep_cell(const SweepSpec& spec, std::size_t index) {
  std::vector<json> values(spec.axes.size());
  for (std::size_t i = spec.axes.size(); i-- > 0;) {
    const auto& v = spec.axes[i].second;
    values[i] = v[index % v.size()];
    index /= v.size();
  }
  return values;
}

json RunManifest::to_json() const {
  return {{"config_hash", config_hash}, {"seed", seed},         {"tool_version", tool_version},
          {"sigma_d_seed", sigma_d_seed}, {"outputs", outputs}, {"duration_s", duration_s}};
}

fs::path resolve_out_dir(const fs::path& requested) {
  if (const char* env = std::getenv("SWARMLOC_OUT"); env && *env) return fs::path(env);
  return requested;
}

ScenarioConfig load_config(const CommonOptions& opt) {
  if (!opt.config_path.empty() && !opt.preset.empty()) throw ConfigError("give either --config or --preset");
  ScenarioConfig cfg;
  if (!opt.config_path.empty())
    cfg = load_scenario(opt.config_path);
  else if (!opt.preset.empty())
    cfg = make_preset(opt.preset);
  else
    throw ConfigError("one of --config or --preset is required");
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.reps) cfg.repetitions = *opt.reps;
  cfg.validate();
  return cfg;
}

int cmd_run(const CommonOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioConfig cfg = load_config(opt);
  const fs::path dir = resolve_out_dir(opt.out_dir);
  prepare_dir(dir);

  RunOptions ro;
  ro.parallelism = opt.parallelism;
  ro.trace_reputation = opt.trace_reputation;
  const auto res = run_scenario(cfg, ro);

  RunManifest m;
  m.config_hash = config_hash(cfg);
  m.seed = cfg.seed;
  m.sigma_d_seed = res.sigma_d_seed;
  const fs::path metrics = dir / "metrics.csv";
  {
    auto os = open_out(metrics);
    write_metrics_csv(os, res.records, cfg.name);
  }
  m.outputs.push_back(metrics.string());
  if (opt.trace_reputation) {
    const fs::path trace = dir / "reputation.csv";
    auto os = open_out(trace);
    write_reputation_csv(os, res.reputation_trace);
    m.outputs.push_back(trace.string());
  }
  const fs::path summary = dir / "summary.json";
  {
    auto os = open_out(summary);
    os << summary_json(cfg, res).dump(2) << '\n';
  }
  m.outputs.push_back(summary.string());
  save_scenario(cfg, dir / "config.json");
  m.outputs.push_back((dir / "config.json").string());
  m.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(dir / "manifest.json", m);
  fmt::print("{}: mean error {:.4f} m (std {:.4f}, {} records)\n", cfg.name, res.summary.mean, res.summary.std,
             res.summary.count);
  return 0;
}

int cmd_sweep(const CommonOptions& opt, const std::string& sweep) {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioConfig base = load_config(opt);
  const SweepSpec spec = parse_sweep(sweep);
  const std::size_t n_cells = spec.cell_count();

  // Validate every cell before running anything.
  std::vector<ScenarioConfig> cells;
  cells.reserve(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    ScenarioConfig cfg = base;
    const auto values = sweep_cell(spec, c);
    for (std::size_t i = 0; i < values.size(); ++i) cfg = apply_field(cfg, spec.axes[i].first, values[i]);
    cfg.name = fmt::format("{}#{}", base.name, c);
    cells.push_back(std::move(cfg));
  }

  const fs::path dir = resolve_out_dir(opt.out_dir);
  prepare_dir(dir);
  const auto converter = make_converter(base.channel);
  std::vector<ScenarioResult> results(n_cells);
  parallel_for(n_cells, opt.parallelism, [&](std::size_t c) {
    RunOptions ro;
    ro.cell = c;
    ro.trace_reputation = opt.trace_reputation;
    if (scenario_to_json(cells[c])["channel"] == scenario_to_json(base)["channel"]) ro.converter = converter;
    results[c] = run_scenario(cells[c], ro);
    const fs::path csv = dir / fmt::format("cell_{:03}.csv", c);
    auto os = open_out(csv);
    write_metrics_csv(os, results[c].records, cells[c].name);
    if (opt.trace_reputation) {
      auto ts = open_out(dir / fmt::format("cell_{:03}_reputation.csv", c));
      write_reputation_csv(ts, results[c].reputation_trace);
    }
  });

  RunManifest m;
  m.config_hash = config_hash(base);
  m.seed = base.seed;
  m.sigma_d_seed = results.front().sigma_d_seed;
  for (std::size_t c = 0; c < n_cells; ++c) {
    m.outputs.push_back((dir / fmt::format("cell_{:03}.csv", c)).string());
    save_scenario(cells[c], dir / fmt::format("cell_{:03}.json", c));
  }

  {
    auto os = open_out(dir / "aggregate.csv");
    os << "cell";
    for (const auto& [path, values] : spec.axes) os << ',' << path;
    os << ",mean_err_m,std_err_m,count\n";
    for (std::size_t c = 0; c < n_cells; ++c) {
      os << c;
      for (const auto& v : sweep_cell(spec, c)) os << ',' << value_text(v);
      os << fmt::format(",{:.6f},{:.6f},{}\n", results[c].summary.mean, results[c].summary.std,
                        results[c].summary.count);
    }
  }
  m.outputs.push_back((dir / "aggregate.csv").string());

  // Pivot: rows are combinations of all but the last axis, columns the last.
  {
    const auto& last = spec.axes.back();
    auto os = open_out(dir / "pivot.csv");
    os << "scheme";
    for (const auto& v : last.second) os << ',' << last.first << '=' << value_text(v);
    os << '\n';
    const std::size_t width = last.second.size();
    for (std::size_t row = 0; row < n_cells / width; ++row) {
      auto values = sweep_cell(spec, row * width);
      values.pop_back();
      SweepSpec head{{spec.axes.begin(), spec.axes.end() - 1}};
      const std::string label = values.empty() ? std::string("all") : cell_label(head, values);
      os << '"' << label << '"';
      for (std::size_t k = 0; k < width; ++k) os << fmt::format(",{:.6f}", results[row * width + k].summary.mean);
      os << '\n';
    }
  }
  m.outputs.push_back((dir / "pivot.csv").string());

  json summary = json::array();
  for (std::size_t c = 0; c < n_cells; ++c) {
    auto s = summary_json(cells[c], results[c]);
    s["cell"] = c;
    s["label"] = cell_label(spec, sweep_cell(spec, c));
    summary.push_back(s);
  }
  {
    auto os = open_out(dir / "summary.json");
    os << summary.dump(2) << '\n';
  }
  m.outputs.push_back((dir / "summary.json").string());
  save_scenario(base, dir / "base_config.json");
  {
    json sj = json::object();
    for (const auto& [k, v] : spec.axes) sj[k] = v;
    auto os = open_out(dir / "sweep.json");
    os << sj.dump(2) << '\n';
  }
  m.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(dir / "manifest.json", m);
  for (std::size_t c = 0; c < n_cells; ++c)
    fmt::print("cell {:3} {:<50} mean {:.4f} m\n", c, cell_label(spec, sweep_cell(spec, c)), results[c].summary.mean);
  return 0;
}

int cmd_export_channel(const CommonOptions& opt, const fs::path& out_csv) {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig cfg;
  if (!opt.config_path.empty() || !opt.preset.empty()) cfg = load_config(opt);
  if (opt.seed) cfg.seed = *opt.seed;
  const RangingChannel ch = with_sigma_d_table(cfg.channel);
  const fs::path path = out_csv.is_absolute() || !out_csv.has_parent_path()
                            ? (out_csv.is_absolute() ? out_csv : resolve_out_dir(opt.out_dir) / out_csv)
                            : out_csv;
  if (path.has_parent_path()) prepare_dir(path.parent_path());
  Rng rng(derive_seed(cfg.seed, 0xc4a9, 0));
  {
    auto os = open_out(path);
    os << "d_m,mean_rssi_dbm,sampled_rssi_dbm,sigma_d_m\n";
    for (double d : ch.sigma_d.grid()) {
      const double mean = rssi_at_distance(ch, d);
      const double s = sample_rssi_sigma(ch, d, rng);
      std::normal_distribution<double> n(0.0, 1.0);
      const double sampled = s > 0.0 ? mean + s * n(rng) : mean;
      os << fmt::format("{:.3f},{:.6f},{:.6f},{:.6f}\n", d, mean, sampled, ch.sigma_d(d));
    }
  }
  RunManifest m;
  m.config_hash = config_hash(cfg);
  m.seed = cfg.seed;
  m.sigma_d_seed = ch.sigma_d.derivation_seed();
  m.outputs.push_back(path.string());
  m.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(fs::path(path.string() + ".manifest.json"), m);
  return 0;
}

int cmd_bench_geometry(const CommonOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  GeometryBenchConfig gc;
  if (opt.seed) gc.seed = *opt.seed;
  if (opt.reps) gc.repetitions = *opt.reps;
  const auto rows = run_geometry_benchmark(gc, opt.parallelism);
  const fs::path dir = resolve_out_dir(opt.out_dir);
  prepare_dir(dir);
  const fs::path csv = dir / "geometry.csv";
  {
    auto os = open_out(csv);
    write_geometry_csv(os, rows);
  }
  RunManifest m;
  m.config_hash = "geometry-benchmark";
  m.seed = gc.seed;
  m.sigma_d_seed = kSigmaDTableSeed;
  m.outputs.push_back(csv.string());
  m.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(dir / "geometry.manifest.json", m);
  for (const auto& r : rows)
    fmt::print("box +-{:.2f} x +-{:.2f}: LS {:.3f}  L1 {:.3f}  GD {:.3f}\n", r.half_width, r.half_height, r.ls, r.l1,
               r.gd);
  return 0;
}

int cmd_bench_stepsize(const CommonOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  StepsizeBenchConfig sc;
  if (!opt.config_path.empty() || !opt.preset.empty()) sc.base = load_config(opt);
  if (opt.seed) sc.base.seed = *opt.seed;
  if (opt.reps) sc.repetitions = *opt.reps;
  const auto res = run_stepsize_benchmark(sc, opt.parallelism);
  const fs::path dir = resolve_out_dir(opt.out_dir);
  prepare_dir(dir);
  const fs::path csv = dir / "stepsize.csv";
  {
    auto os = open_out(csv);
    write_stepsize_csv(os, res);
  }
  RunManifest m;
  m.config_hash = config_hash(sc.base);
  m.seed = sc.base.seed;
  m.sigma_d_seed = kSigmaDTableSeed;
  m.outputs.push_back(csv.string());
  m.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(dir / "stepsize.manifest.json", m);
  const auto fixed = res.fixed_means();
  for (std::size_t k = 0; k < fixed.size(); ++k) fmt::print("alpha {:.1f}: {:.4f} m\n", res.alphas[k], fixed[k]);
  fmt::print("MAGD: {:.4f} m\n", res.magd_mean());
  return 0;
}

int cmd_write_presets(const fs::path& dir) {
  prepare_dir(dir);
  for (const auto& name : committed_preset_names()) save_scenario(make_preset(name), dir / (name + ".json"));
  return 0;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Multi-UAV mutual localization simulator"};
  app.require_subcommand(1);
  CommonOptions opt;
  std::string out = "out";
  std::uint64_t seed = 0;
  int reps = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "scenario config (JSON)");
    sub->add_option("--preset", opt.preset, "built-in preset name");
    sub->add_option("--seed", seed, "master seed override");
    sub->add_option("--reps", reps, "repetition count override");
    sub->add_option("--out", out, "output directory (SWARMLOC_OUT overrides)");
    sub->add_option("--parallel", opt.parallelism, "worker threads")->check(CLI::PositiveNumber);
  };

  auto* run = app.add_subcommand("run", "run one scenario");
  add_common(run);
  run->add_flag("--trace-reputation", opt.trace_reputation, "write per-tick reputation traces");

  std::string sweep;
  auto* sw = app.add_subcommand("sweep", "run the cross product of field values");
  add_common(sw);
  sw->add_option("--sweep", sweep, "JSON file or inline field=v1,v2;field=...")->required();
  sw->add_flag("--trace-reputation", opt.trace_reputation, "write per-tick reputation traces");

  std::string channel_csv = "channel.csv";
  auto* ex = app.add_subcommand("export-channel", "write RSSI and sigma_d curves");
  add_common(ex);
  ex->add_option("--csv", channel_csv, "output CSV (relative names go under --out)");

  auto* bg = app.add_subcommand("bench-geometry", "static anchor-box benchmark");
  add_common(bg);
  auto* bs = app.add_subcommand("bench-stepsize", "fixed step sizes against MAGD");
  add_common(bs);

  std::string preset_dir = "presets";
  auto* pr = app.add_subcommand("presets", "write every built-in preset as a JSON file");
  pr->add_option("--dir", preset_dir, "target directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  opt.out_dir = out;
  for (auto* sub : {run, sw, ex, bg, bs}) {
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--reps")) opt.reps = reps;
  }

  try {
    if (*run) return cmd_run(opt);
    if (*sw) return cmd_sweep(opt, sweep);
    if (*ex) return cmd_export_channel(opt, channel_csv);
    if (*bg) return cmd_bench_geometry(opt);
    if (*bs) return cmd_bench_stepsize(opt);
    if (*pr) return cmd_write_presets(preset_dir);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  } catch (const std::ios_base::failure& e) {
    fmt::print(stderr, "I/O error: {}\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}

}  // namespace swarmloc
