#pragma once

#include "swarmloc/channel.hpp"
#include "swarmloc/localizers.hpp"
#include "swarmloc/scenario.hpp"

#include <iosfwd>
#include <vector>

namespace swarmloc {

/// Static single-target benchmark: N anchors uniform in a box
/// [+-a, +-a, +-c] around the target, with a^2 + a^2 + c^2 = max_distance^2
/// so the farthest corner stays at max_distance.
struct GeometryBenchConfig {
  std::vector<double> half_heights = {1, 4, 7, 10, 13, 16, 19, 22, 25, 28};  // c, m
  double max_distance = 50.0;
  int n_anchors = 30;
  int repetitions = 50;
  RangingChannel channel;
  PositionNoiseModel position_noise{0.1, 3.0, PositionNoiseModel::Bounds::kStd};
  AdmmConfig admm{0.1, 30};
  GdConfig gd{1.0, 0.5, 30};
  std::uint64_t seed = 7;
  int max_resamples = 100;
};

struct GeometryBenchRow {
  double half_width = 0.0;   // a
  double half_height = 0.0;  // c
  double ls = 0.0;           // mean error, m
  double l1 = 0.0;
  double gd = 0.0;
  int resampled = 0;  // draws rejected for singular geometry
};

double box_half_width(double half_height, double max_distance);

std::vector<GeometryBenchRow> run_geometry_benchmark(const GeometryBenchConfig& cfg, int parallelism = 1);
void write_geometry_csv(std::ostream& os, const std::vector<GeometryBenchRow>& rows);

/// Fixed step sizes against MAGD over a sweep of anchor counts. Every
/// column of one anchor count shares the same seeds.
struct StepsizeBenchConfig {
  ScenarioConfig base;  // setup1 by default
  std::vector<int> anchor_counts = {5, 10, 15, 20, 25, 30, 35, 40};
  std::vector<double> alphas = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  int repetitions = 20;
  StepsizeBenchConfig();
};

struct StepsizeBenchRow {
  int n_anchors = 0;
  std::vector<double> fixed;  // mean error per alpha
  double magd = 0.0;
};

struct StepsizeBenchResult {
  std::vector<double> alphas;
  std::vector<StepsizeBenchRow> rows;

  double magd_mean() const;
  std::vector<double> fixed_means() const;  // per alpha, averaged over anchor counts
};

StepsizeBenchResult run_stepsize_benchmark(const StepsizeBenchConfig& cfg, int parallelism = 1);
void write_stepsize_csv(std::ostream& os, const StepsizeBenchResult& result);

}  // namespace swarmloc
