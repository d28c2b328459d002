#pragma once

#include "swarmloc/channel.hpp"
#include "swarmloc/common.hpp"
#include "swarmloc/observation.hpp"

#include <map>
#include <shared_mutex>
#include <span>
#include <utility>
#include <vector>

namespace swarmloc {

struct AdmmConfig {
  double rho = 0.1;
  int k_admm = 30;
  void validate() const;
};

struct GdConfig {
  double alpha0 = 1.0;  // m
  double beta = 0.5;
  int k_gd = 30;
  void validate() const;
};

/// Linearized multilateration. Rows of A are [-2x, -2y, -2z, 1] and
/// b = d^2 - |p|^2; the unknown is [x, y, z, |p|^2].
Vec3 localize_ls(const ObservationSet& obs);

/// sign(x) * max(|x| - k, 0)
double soft_threshold(double x, double k);

/// L1 plane fit min |w|_1 s.t. A u - w = b, solved with ADMM.
Vec3 localize_l1_admm(const ObservationSet& obs, const AdmmConfig& cfg);

/// Surrogate cost 1/2 * sum (|p_n - p| - d_n)^2 and its gradient.
double gd_cost(const ObservationSet& obs, const Vec3& p);
Vec3 gd_gradient(const ObservationSet& obs, const Vec3& p);

/// Normalized-step gradient descent from `start`; the step is multiplied by
/// beta whenever the cost increases.
Vec3 localize_gd(const ObservationSet& obs, const GdConfig& cfg, const Vec3& start);

/// Combined distance-residual Gaussian for an anchor whose reported position
/// carries error sigma_p and whose range carries error sigma_d(d).
struct ConvertedError {
  double mu_cd = 0.0;
  double sigma_cd = 0.0;
};

inline constexpr std::size_t kConversionSamples = 20000;
inline constexpr std::uint64_t kConversionSeed = 0xc0417e5ULL;

/// Mean and variance of zeta = |d e + offset| - d, offset ~ per-axis
/// N(0, sigma_p^2 / 3). Uses one fixed sample set for every (d, sigma_p), so
/// the result is deterministic and monotone in d.
std::pair<double, double> position_residual_moments(double d, double sigma_p);

ConvertedError convert_error(double d_meas, double sigma_p, const RangingChannel& ch);

/// convert_error with the position-residual moments memoized on a
/// (1 m, 0.1 m) grid. Safe for concurrent use.
class ErrorConverter {
 public:
  explicit ErrorConverter(SigmaDTable sigma_d) : sigma_d_(std::move(sigma_d)) {}

  ConvertedError operator()(double d_meas, double sigma_p) const;
  std::size_t cache_size() const;

 private:
  using Key = std::pair<long, long>;
  SigmaDTable sigma_d_;
  mutable std::shared_mutex mu_;
  mutable std::map<Key, std::pair<double, double>> cache_;
};

/// w_n = sum(sigma) / (n * sigma_n)
std::vector<double> error_weights(std::span<const double> sigmas);

}  // namespace swarmloc
