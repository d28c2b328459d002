#include "swarmloc/localizers.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <mutex>
#include <set>

namespace swarmloc {
namespace {

struct LinearSystem {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::Matrix4d g;  // (A^T A)^-1
};

LinearSystem build_linear_system(const ObservationSet& obs) {
  const auto n = static_cast<Eigen::Index>(obs.size());
  if (n == 0) throw NoAnchorError("linear solver: no anchors");
  if (n < 4) throw SingularGeometryError("linear solver needs >= 4 anchors");
  std::set<UavId> ids;
  LinearSystem s{Eigen::MatrixXd(n, 4), Eigen::VectorXd(n), Eigen::Matrix4d::Zero()};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = obs.reports[static_cast<std::size_t>(i)];
    if (!ids.insert(r.anchor_id).second) throw DomainError("duplicate anchor id in observation set");
    s.a.row(i) << -2.0 * r.reported_pos.x(), -2.0 * r.reported_pos.y(), -2.0 * r.reported_pos.z(), 1.0;
    s.b(i) = r.measured_distance * r.measured_distance - r.reported_pos.squaredNorm();
  }
  const Eigen::Matrix4d ata = s.a.transpose() * s.a;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(s.a);
  qr.setThreshold(1e-10);
  if (qr.rank() < 4) throw SingularGeometryError("anchor geometry is rank deficient");
  Eigen::FullPivLU<Eigen::Matrix4d> lu(ata);
  if (!lu.isInvertible()) throw SingularGeometryError("A^T A is singular");
  s.g = lu.inverse();
  return s;
}

// Offsets used by position_residual_moments, drawn once.
const std::vector<std::array<double, 3>>& unit_offsets() {
  static const std::vector<std::array<double, 3>> samples = [] {
    Rng rng(kConversionSeed);
    std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(3.0));
    std::vector<std::array<double, 3>> v(kConversionSamples);
    for (auto& s : v) {
      s[0] = n(rng);
      s[1] = n(rng);
      s[2] = n(rng);
    }
    return v;
  }();
  return samples;
}

ConvertedError combine(std::pair<double, double> zeta, double sigma_d) {
  return {zeta.first, std::sqrt(zeta.second + sigma_d * sigma_d)};
}

}  // namespace

void AdmmConfig::validate() const {
  if (!(rho > 0.0)) throw ConfigError("admm.rho must be > 0");
  if (k_admm < 1) throw ConfigError("admm.k_admm must be >= 1");
}

void GdConfig::validate() const {
  if (!(alpha0 > 0.0)) throw ConfigError("gd.alpha0 must be > 0");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("gd.beta must be in (0, 1)");
  if (k_gd < 1) throw ConfigError("gd.k_gd must be >= 1");
}

Vec3 localize_ls(const ObservationSet& obs) {
  const auto s = build_linear_system(obs);
  const Eigen::Vector4d u = s.g * (s.a.transpose() * s.b);
  return u.head<3>();
}

double soft_threshold(double x, double k) {
  const double m = std::abs(x) - k;
  if (m <= 0.0) return 0.0;
  return x < 0.0 ? -m : m;
}

Vec3 localize_l1_admm(const ObservationSet& obs, const AdmmConfig& cfg) {
  cfg.validate();
  const auto s = build_linear_system(obs);
  const auto n = s.b.size();
  const double kappa = 1.0 / cfg.rho;
  const Eigen::Matrix<double, 4, Eigen::Dynamic> gat = s.g * s.a.transpose();
  Eigen::Vector4d u = Eigen::Vector4d::Zero();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < cfg.k_admm; ++i) {
    u = gat * (s.b + w - lambda / cfg.rho);
    const Eigen::VectorXd au_b = s.a * u - s.b;
    const Eigen::VectorXd v = au_b + lambda / cfg.rho;
    for (Eigen::Index j = 0; j < n; ++j) w(j) = soft_threshold(v(j), kappa);
    lambda += cfg.rho * (au_b - w);
  }
  return u.head<3>();
}

double gd_cost(const ObservationSet& obs, const Vec3& p) {
  double f = 0.0;
  for (const auto& r : obs.reports) {
    const double e = (r.reported_pos - p).norm() - r.measured_distance;
    f += 0.5 * e * e;
  }
  return f;
}

Vec3 gd_gradient(const ObservationSet& obs, const Vec3& p) {
  Vec3 g = Vec3::Zero();
  for (const auto& r : obs.reports) {
    const Vec3 diff = p - r.reported_pos;
    const double dist = diff.norm();
    if (dist == 0.0) continue;
    g += diff * ((dist - r.measured_distance) / dist);
  }
  return g;
}

Vec3 localize_gd(const ObservationSet& obs, const GdConfig& cfg, const Vec3& start) {
  cfg.validate();
  if (obs.empty()) throw NoAnchorError("localize_gd: no anchors");
  if (!is_finite(start)) throw DomainError("localize_gd: non-finite start");
  Vec3 p = start;
  double alpha = cfg.alpha0;
  double cost = gd_cost(obs, p);
  for (int i = 0; i < cfg.k_gd; ++i) {
    for (const auto& r : obs.reports) {
      // The gradient is singular on an anchor; nudge off it.
      if ((p - r.reported_pos).norm() == 0.0) p.x() += 1e-6;
    }
    const Vec3 g = -gd_gradient(obs, p);
    const double gn = g.norm();
    if (gn == 0.0) break;
    p += alpha * g / gn;
    const double next = gd_cost(obs, p);
    if (next > cost) alpha *= cfg.beta;
    cost = next;
  }
  return p;
}

std::pair<double, double> position_residual_moments(double d, double sigma_p) {
  if (!(d > 0.0)) throw DomainError("position_residual_moments: distance must be > 0");
  if (!(sigma_p >= 0.0)) throw DomainError("position_residual_moments: sigma_p must be >= 0");
  if (sigma_p == 0.0) return {0.0, 0.0};
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (const auto& s : unit_offsets()) {
    const double x = sigma_p * s[0];
    const double y = sigma_p * s[1];
    const double z = d + sigma_p * s[2];
    const double zeta = std::sqrt(x * x + y * y + z * z) - d;
    ++k;
    const double delta = zeta - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (zeta - mean);
  }
  return {mean, m2 / static_cast<double>(k - 1)};
}

ConvertedError convert_error(double d_meas, double sigma_p, const RangingChannel& ch) {
  if (!(d_meas > 0.0)) throw DomainError("convert_error: measured distance must be > 0");
  if (!(sigma_p >= 0.0)) throw DomainError("convert_error: sigma_p must be >= 0");
  return combine(position_residual_moments(d_meas, sigma_p), ch.sigma_d(d_meas));
}

ConvertedError ErrorConverter::operator()(double d_meas, double sigma_p) const {
  if (!(d_meas > 0.0)) throw DomainError("convert_error: measured distance must be > 0");
  if (!(sigma_p >= 0.0)) throw DomainError("convert_error: sigma_p must be >= 0");
  const Key key{std::max(1L, std::lround(d_meas)), std::lround(sigma_p * 10.0)};
  {
    std::shared_lock lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return combine(it->second, sigma_d_(d_meas));
  }
  const auto m = position_residual_moments(static_cast<double>(key.first),
                                           static_cast<double>(key.second) / 10.0);
  {
    std::unique_lock lock(mu_);
    cache_.emplace(key, m);
  }
  return combine(m, sigma_d_(d_meas));
}

std::size_t ErrorConverter::cache_size() const {
  std::shared_lock lock(mu_);
  return cache_.size();
}

std::vector<double> error_weights(std::span<const double> sigmas) {
  double total = 0.0;
  for (double s : sigmas) {
    if (!(s > 0.0)) throw DomainError("error_weights: sigma must be > 0");
    total += s;
  }
  const auto n = static_cast<double>(sigmas.size());
  std::vector<double> w;
  w.reserve(sigmas.size());
  for (double s : sigmas) w.push_back(total / (n * s));
  return w;
}

}  // namespace swarmloc
