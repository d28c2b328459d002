#include "swarmloc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace swarmloc {

SigmaDTable::SigmaDTable(std::vector<double> grid, std::vector<double> sigma)
    : grid_(std::move(grid)), sigma_(std::move(sigma)) {
  if (grid_.empty()) throw ConfigError("sigma_d table: empty grid");
  if (grid_.size() != sigma_.size()) throw ConfigError("sigma_d table: size mismatch");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!(grid_[i] > 0.0)) throw ConfigError("sigma_d table: grid must be positive");
    if (i > 0 && !(grid_[i] > grid_[i - 1]))
      throw ConfigError("sigma_d table: grid must be strictly increasing");
    if (!(sigma_[i] >= 0.0)) throw ConfigError("sigma_d table: negative sigma");
  }
}

double SigmaDTable::operator()(double d) const {
  if (grid_.empty()) return 0.0;
  if (d <= grid_.front()) return sigma_.front();
  if (d >= grid_.back()) return sigma_.back();
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), d);
  const auto hi = static_cast<std::size_t>(it - grid_.begin());
  const auto lo = hi - 1;
  const double f = (d - grid_[lo]) / (grid_[hi] - grid_[lo]);
  return sigma_[lo] + f * (sigma_[hi] - sigma_[lo]);
}

std::vector<double> SigmaDTable::binned(std::size_t window) const {
  std::vector<double> out;
  if (window == 0) return out;
  for (std::size_t i = 0; i + window <= sigma_.size(); i += window) {
    double s = 0.0;
    for (std::size_t j = i; j < i + window; ++j) s += sigma_[j];
    out.push_back(s / static_cast<double>(window));
  }
  return out;
}

void SigmaDTable::write_csv(std::ostream& os) const {
  os << "d_m,sigma_d_m\n";
  for (std::size_t i = 0; i < grid_.size(); ++i)
    os << fmt::format("{:.6f},{:.6f}\n", grid_[i], sigma_[i]);
}

void RangingChannel::validate() const {
  if (!(path_loss_exponent > 0.0)) throw ConfigError("channel.path_loss_exponent must be > 0");
  if (!(reference_distance > 0.0)) throw ConfigError("channel.reference_distance must be > 0");
  if (!std::isfinite(rssi_at_reference)) throw ConfigError("channel.rssi_at_reference must be finite");
  if (!(sigma_min_rssi >= 0.0) || !(sigma_max_rssi >= sigma_min_rssi))
    throw ConfigError("channel: require 0 <= sigma_min_rssi <= sigma_max_rssi");
  if (!(distance_scaling >= 0.0)) throw ConfigError("channel.distance_scaling must be >= 0");
}

double rssi_at_distance(const RangingChannel& ch, double d) {
  if (!(d > 0.0)) throw DomainError("rssi_at_distance: distance must be > 0");
  return ch.rssi_at_reference - 10.0 * ch.path_loss_exponent * std::log10(d / ch.reference_distance);
}

double invert_rssi(const RangingChannel& ch, double rssi) {
  return ch.reference_distance *
         std::pow(10.0, (ch.rssi_at_reference - rssi) / (10.0 * ch.path_loss_exponent));
}

double rssi_sigma_scale(const RangingChannel& ch, double d) {
  return ch.distance_scaling * d * d + 1.0;
}

double sample_rssi_sigma(const RangingChannel& ch, double d, Rng& rng) {
  if (!(d > 0.0)) throw DomainError("sample_rssi_sigma: distance must be > 0");
  std::uniform_real_distribution<double> u(ch.sigma_min_rssi, ch.sigma_max_rssi);
  const double draw = ch.sigma_min_rssi == ch.sigma_max_rssi ? ch.sigma_min_rssi : u(rng);
  return rssi_sigma_scale(ch, d) * draw;
}

double measure_distance(const RangingChannel& ch, double true_d, Rng& rng) {
  if (!(true_d > 0.0)) throw DomainError("measure_distance: distance must be > 0");
  const double sigma_r = sample_rssi_sigma(ch, true_d, rng);
  if (sigma_r == 0.0) return true_d;
  std::normal_distribution<double> noise(0.0, sigma_r);
  return invert_rssi(ch, rssi_at_distance(ch, true_d) + noise(rng));
}

SigmaDTable build_sigma_d_table(const RangingChannel& ch, std::span<const double> grid,
                                std::size_t samples_per_point, std::uint64_t seed) {
  if (grid.empty()) throw ConfigError("build_sigma_d_table: empty grid");
  if (samples_per_point < kMinSigmaDSamples)
    throw ConfigError("build_sigma_d_table: need >= 1e4 samples per point");
  std::vector<double> sigma(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw ConfigError("build_sigma_d_table: grid must be positive");
    Rng rng(derive_seed(seed, i, 0));
    // Welford accumulation of (d_meas - d).
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < samples_per_point; ++k) {
      const double e = measure_distance(ch, grid[i], rng) - grid[i];
      const double delta = e - mean;
      mean += delta / static_cast<double>(k + 1);
      m2 += delta * (e - mean);
    }
    sigma[i] = std::sqrt(m2 / static_cast<double>(samples_per_point - 1));
  }
  SigmaDTable t({grid.begin(), grid.end()}, std::move(sigma));
  t.set_derivation_seed(seed);
  return t;
}

SigmaDTable build_default_sigma_d_table(const RangingChannel& ch, std::uint64_t seed) {
  std::vector<double> grid(200);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i + 1);
  return build_sigma_d_table(ch, grid, 20000, seed);
}

RangingChannel with_sigma_d_table(RangingChannel ch, std::uint64_t seed) {
  ch.validate();
  ch.sigma_d = build_default_sigma_d_table(ch, seed);
  return ch;
}

void PositionNoiseModel::validate() const {
  if (!(lo >= 0.0) || !(hi >= lo)) throw ConfigError("position noise: require 0 <= lo <= hi");
}

double PositionNoiseModel::min_sigma() const {
  return bounds == Bounds::kPower ? std::sqrt(lo) : lo;
}

double PositionNoiseModel::max_sigma() const {
  return bounds == Bounds::kPower ? std::sqrt(hi) : hi;
}

double PositionNoiseModel::draw(Rng& rng) const {
  std::uniform_real_distribution<double> u(lo, hi);
  const double v = lo == hi ? lo : u(rng);
  return bounds == Bounds::kPower ? std::sqrt(v) : v;
}

Vec3 sample_position_offset(double sigma_p, Rng& rng) {
  if (!(sigma_p >= 0.0)) throw DomainError("sample_position_offset: sigma_p must be >= 0");
  if (sigma_p == 0.0) return Vec3::Zero();
  std::normal_distribution<double> n(0.0, sigma_p / std::sqrt(3.0));
  const double x = n(rng);
  const double y = n(rng);
  const double z = n(rng);
  return {x, y, z};
}

}  // namespace swarmloc
