#include "swarmloc/benchmarks.hpp"

#include "swarmloc/engine.hpp"
#include "swarmloc/presets.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace swarmloc {
namespace {

struct Draw {
  ObservationSet obs;
  Vec3 target = Vec3::Zero();
};

Draw draw_box(const GeometryBenchConfig& cfg, double a, double c, Rng& rng) {
  Draw d;
  std::uniform_real_distribution<double> ux(-a, a);
  std::uniform_real_distribution<double> uz(-c, c);
  for (int i = 0; i < cfg.n_anchors; ++i) {
    UavState u;
    u.id = static_cast<UavId>(i);
    for (;;) {
      const double x = ux(rng);
      const double y = ux(rng);
      const double z = uz(rng);
      u.true_pos = Vec3(x, y, z);
      if (u.true_pos.norm() > 0.0) break;
    }
    u.sigma_p = cfg.position_noise.draw(rng);
    d.obs.reports.push_back(observe(u, d.target, cfg.channel, rng));
  }
  return d;
}

}  // namespace

double box_half_width(double half_height, double max_distance) {
  if (!(half_height >= 0.0) || !(half_height <= max_distance))
    throw DomainError("box_half_width: half height outside [0, max_distance]");
  return std::sqrt((max_distance * max_distance - half_height * half_height) / 2.0);
}

std::vector<GeometryBenchRow> run_geometry_benchmark(const GeometryBenchConfig& cfg, int parallelism) {
  if (cfg.n_anchors < 4) throw ConfigError("geometry benchmark needs at least 4 anchors");
  if (cfg.repetitions < 1) throw ConfigError("geometry benchmark needs at least 1 repetition");
  cfg.channel.validate();
  cfg.position_noise.validate();

  std::vector<GeometryBenchRow> rows(cfg.half_heights.size());
  parallel_for(rows.size(), parallelism, [&](std::size_t s) {
    auto& row = rows[s];
    row.half_height = cfg.half_heights[s];
    row.half_width = box_half_width(row.half_height, cfg.max_distance);
    double ls = 0.0;
    double l1 = 0.0;
    double gd = 0.0;
    for (int r = 0; r < cfg.repetitions; ++r) {
      Rng rng(derive_seed(cfg.seed, s, static_cast<std::uint64_t>(r)));
      for (int attempt = 0;; ++attempt) {
        if (attempt > cfg.max_resamples) throw SingularGeometryError("geometry benchmark: too many singular draws");
        const Draw d = draw_box(cfg, row.half_width, row.half_height, rng);
        try {
          const Vec3 p_ls = localize_ls(d.obs);
          const Vec3 p_l1 = localize_l1_admm(d.obs, cfg.admm);
          const Vec3 p_gd = localize_gd(d.obs, cfg.gd, centroid_of_reports(d.obs));
          ls += (p_ls - d.target).norm();
          l1 += (p_l1 - d.target).norm();
          gd += (p_gd - d.target).norm();
          break;
        } catch (const SingularGeometryError&) {
          ++row.resampled;
        }
      }
    }
    const double n = cfg.repetitions;
    row.ls = ls / n;
    row.l1 = l1 / n;
    row.gd = gd / n;
  });
  return rows;
}

void write_geometry_csv(std::ostream& os, const std::vector<GeometryBenchRow>& rows) {
  os << "half_width_m,half_height_m,ls_err_m,l1_err_m,gd_err_m,resampled\n";
  for (const auto& r : rows)
    os << fmt::format("{:.4f},{:.4f},{:.6f},{:.6f},{:.6f},{}\n", r.half_width, r.half_height, r.ls, r.l1, r.gd,
                      r.resampled);
}

StepsizeBenchConfig::StepsizeBenchConfig() : base(setup1_preset()) {}

double StepsizeBenchResult::magd_mean() const {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) s += r.magd;
  return s / static_cast<double>(rows.size());
}

std::vector<double> StepsizeBenchResult::fixed_means() const {
  std::vector<double> m(alphas.size(), 0.0);
  if (rows.empty()) return m;
  for (const auto& r : rows)
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += r.fixed[k];
  for (auto& v : m) v /= static_cast<double>(rows.size());
  return m;
}

StepsizeBenchResult run_stepsize_benchmark(const StepsizeBenchConfig& cfg, int parallelism) {
  if (cfg.anchor_counts.empty()) throw ConfigError("stepsize benchmark: empty anchor sweep");
  StepsizeBenchResult result;
  result.alphas = cfg.alphas;
  result.rows.resize(cfg.anchor_counts.size());
  const auto converter = make_converter(cfg.base.channel);
  const std::size_t columns = cfg.alphas.size() + 1;

  std::vector<double> cells(result.rows.size() * columns, 0.0);
  parallel_for(cells.size(), parallelism, [&](std::size_t idx) {
    const std::size_t row = idx / columns;
    const std::size_t col = idx % columns;
    ScenarioConfig sc = cfg.base;
    sc.n_anchors = cfg.anchor_counts[row];
    sc.repetitions = cfg.repetitions;
    sc.magd.fixed_alpha = col < cfg.alphas.size() ? std::optional<double>(cfg.alphas[col]) : std::nullopt;
    RunOptions opt;
    opt.converter = converter;
    opt.cell = static_cast<std::uint64_t>(sc.n_anchors);  // shared by every column of the row
    cells[idx] = run_scenario(sc, opt).summary.mean;
  });

  for (std::size_t row = 0; row < result.rows.size(); ++row) {
    auto& r = result.rows[row];
    r.n_anchors = cfg.anchor_counts[row];
    r.fixed.assign(cells.begin() + static_cast<std::ptrdiff_t>(row * columns),
                   cells.begin() + static_cast<std::ptrdiff_t>(row * columns + cfg.alphas.size()));
    r.magd = cells[row * columns + cfg.alphas.size()];
  }
  return result;
}

void write_stepsize_csv(std::ostream& os, const StepsizeBenchResult& result) {
  os << "n_anchors";
  for (double a : result.alphas) os << fmt::format(",alpha_{:g}", a);
  os << ",magd\n";
  for (const auto& r : result.rows) {
    os << r.n_anchors;
    for (double v : r.fixed) os << fmt::format(",{:.6f}", v);
    os << fmt::format(",{:.6f}\n", r.magd);
  }
}

}  // namespace swarmloc
