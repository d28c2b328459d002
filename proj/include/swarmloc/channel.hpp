#pragma once

#include "swarmloc/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace swarmloc {

/// Distance-error standard deviation sigma_d(d), tabulated on a grid and
/// linearly interpolated between grid points. Outside the grid the nearest
/// endpoint value is returned.
class SigmaDTable {
 public:
  SigmaDTable() = default;
  SigmaDTable(std::vector<double> grid, std::vector<double> sigma);

  double operator()(double d) const;

  bool empty() const { return grid_.empty(); }
  std::span<const double> grid() const { return grid_; }
  std::span<const double> values() const { return sigma_; }
  std::uint64_t derivation_seed() const { return seed_; }
  void set_derivation_seed(std::uint64_t s) { seed_ = s; }

  /// Means over consecutive windows of `window` grid points.
  std::vector<double> binned(std::size_t window) const;

  /// Two-column CSV: d_m,sigma_d_m
  void write_csv(std::ostream& os) const;

 private:
  std::vector<double> grid_;
  std::vector<double> sigma_;
  std::uint64_t seed_ = 0;
};

/// Log-distance path loss with a distance-dependent, uniformly drawn RSSI
/// error spread. Defaults are the outdoor NLOS fit: n_p = 3, d0 = 1 m,
/// P(d0) = -30 dBm, sigma_r in gamma_d * U(0.5, 2) dB, S = 1e-4 / m^2.
struct RangingChannel {
  double path_loss_exponent = 3.0;
  double reference_distance = 1.0;   // m
  double rssi_at_reference = -30.0;  // dBm
  double sigma_min_rssi = 0.5;       // dB
  double sigma_max_rssi = 2.0;       // dB
  double distance_scaling = 1e-4;    // 1/m^2

  SigmaDTable sigma_d;

  void validate() const;
  bool noiseless() const { return sigma_max_rssi == 0.0; }
};

inline constexpr std::uint64_t kSigmaDTableSeed = 0x5d7ab1e5eedULL;
inline constexpr std::size_t kMinSigmaDSamples = 10000;

double rssi_at_distance(const RangingChannel& ch, double d);
double invert_rssi(const RangingChannel& ch, double rssi);

/// gamma_d = S * d^2 + 1
double rssi_sigma_scale(const RangingChannel& ch, double d);
double sample_rssi_sigma(const RangingChannel& ch, double d, Rng& rng);

/// RSSI-ranged distance: noise is applied in the dB domain and mapped back
/// through the path-loss inverse, so the result is always positive.
double measure_distance(const RangingChannel& ch, double true_d, Rng& rng);

/// Monte-Carlo estimate of sigma_d on `grid`. Each grid point draws from its
/// own stream derived from `seed`, so the table does not depend on the
/// evaluation order.
SigmaDTable build_sigma_d_table(const RangingChannel& ch, std::span<const double> grid,
                                std::size_t samples_per_point, std::uint64_t seed);

/// 1 m spacing over (0, 200] m, 2e4 samples per point.
SigmaDTable build_default_sigma_d_table(const RangingChannel& ch,
                                        std::uint64_t seed = kSigmaDTableSeed);

/// Returns a copy of `ch` with its sigma_d table filled in (default grid).
RangingChannel with_sigma_d_table(RangingChannel ch, std::uint64_t seed = kSigmaDTableSeed);

/// Per-UAV position error std. The bounds are either on the std directly
/// or on the error power sigma_p^2 (uniform in power, then square-rooted).
struct PositionNoiseModel {
  enum class Bounds { kStd, kPower };
  double lo = 0.1;
  double hi = 3.0;
  Bounds bounds = Bounds::kPower;

  void validate() const;
  double min_sigma() const;
  double max_sigma() const;
  double draw(Rng& rng) const;
};

/// Three i.i.d. axes with std sigma_p / sqrt(3) each, so E|offset|^2 = sigma_p^2.
Vec3 sample_position_offset(double sigma_p, Rng& rng);

}  // namespace swarmloc
