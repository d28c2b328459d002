#include "swarmloc/localizers.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace swarmloc;

namespace {

ObservationSet exact_reports(const Vec3& target, const std::vector<Vec3>& anchors) {
  ObservationSet obs;
  UavId id = 0;
  for (const auto& a : anchors) obs.reports.push_back({id++, a, 0.0, (a - target).norm()});
  return obs;
}

std::vector<Vec3> random_anchors(int n, Rng& rng, double half = 40.0) {
  std::uniform_real_distribution<double> u(-half, half);
  std::vector<Vec3> out;
  for (int i = 0; i < n; ++i) out.emplace_back(u(rng), u(rng), u(rng));
  return out;
}

}  // namespace

TEST_CASE("least squares recovers the target from exact ranges") {
  Rng rng(21);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 target(u(rng), u(rng), u(rng));
    const auto obs = exact_reports(target, random_anchors(4 + trial % 20, rng));
    CHECK((localize_ls(obs) - target).norm() < 1e-6);
  }
}

TEST_CASE("least squares rejects coplanar and underdetermined geometry") {
  const Vec3 target(1.0, 2.0, 3.0);
  std::vector<Vec3> flat = {{0, 0, 0}, {10, 0, 0}, {0, 10, 0}, {10, 10, 0}, {5, 3, 0}};
  CHECK_THROWS_AS(localize_ls(exact_reports(target, flat)), SingularGeometryError);
  std::vector<Vec3> three = {{0, 0, 0}, {10, 0, 5}, {0, 10, 2}};
  CHECK_THROWS(localize_ls(exact_reports(target, three)));
  CHECK_THROWS_AS(localize_ls(ObservationSet{}), NoAnchorError);
}

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(3.0, 1.0) == 2.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
  CHECK(soft_threshold(0.5, 1.0) == 0.0);
  CHECK(soft_threshold(-1.0, 1.0) == 0.0);
}

TEST_CASE("ADMM matches least squares on exact ranges") {
  Rng rng(4);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 target(u(rng), u(rng), u(rng));
    const auto obs = exact_reports(target, random_anchors(30, rng));
    const Vec3 ls = localize_ls(obs);
    const Vec3 l1 = localize_l1_admm(obs, AdmmConfig{});
    CHECK((l1 - ls).norm() < 1e-3);
  }
}

TEST_CASE("ADMM resists a single gross outlier better than least squares") {
  Rng rng(8);
  const Vec3 target(3.0, -2.0, 1.0);
  auto obs = exact_reports(target, random_anchors(30, rng));
  obs.reports[0].measured_distance += 60.0;
  const double e_ls = (localize_ls(obs) - target).norm();
  const double e_l1 = (localize_l1_admm(obs, AdmmConfig{0.1, 300}) - target).norm();
  CHECK(e_l1 < e_ls);
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(13);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  std::normal_distribution<double> noise(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto obs = exact_reports(Vec3(u(rng), u(rng), u(rng)), random_anchors(12, rng));
    for (auto& r : obs.reports) r.measured_distance = std::abs(r.measured_distance + noise(rng));
    const Vec3 p(u(rng), u(rng), u(rng));
    const Vec3 g = gd_gradient(obs, p);
    const double h = 1e-5;
    for (int k = 0; k < 3; ++k) {
      Vec3 a = p, b = p;
      a[k] += h;
      b[k] -= h;
      const double fd = (gd_cost(obs, a) - gd_cost(obs, b)) / (2.0 * h);
      CHECK(std::abs(fd - g[k]) <= 1e-5 * std::max(1.0, std::abs(g[k])));
    }
  }
}

TEST_CASE("gradient descent converges on exact ranges") {
  Rng rng(2);
  const Vec3 target(5.0, 5.0, 5.0);
  const auto obs = exact_reports(target, random_anchors(20, rng));
  const Vec3 start = target + Vec3(8.0, -6.0, 3.0);
  const Vec3 p = localize_gd(obs, GdConfig{1.0, 0.5, 300}, start);
  CHECK((p - target).norm() < 0.05);
  CHECK(gd_cost(obs, p) < gd_cost(obs, start));
}

TEST_CASE("error weights: reciprocals sum to the anchor count") {
  Rng rng(9);
  std::uniform_real_distribution<double> u(0.01, 50.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> s(1 + trial % 40);
    for (auto& x : s) x = u(rng);
    const auto w = error_weights(s);
    double recip = 0.0;
    for (double x : w) recip += 1.0 / x;
    CHECK(std::abs(recip - static_cast<double>(s.size())) <= 1e-12 * static_cast<double>(s.size()));
    const double sum = std::accumulate(s.begin(), s.end(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i)
      CHECK(w[i] == doctest::Approx(sum / (static_cast<double>(s.size()) * s[i])));
  }
  const std::vector<double> equal(7, 2.5);
  for (double x : error_weights(equal)) CHECK(x == doctest::Approx(1.0));
}

TEST_CASE("position residual moments match a small-offset expansion") {
  // For sigma_p << d the residual is the radial offset plus (x^2 + y^2) / 2d.
  const double d = 80.0, sp = 2.0;
  const auto [mean, var] = position_residual_moments(d, sp);
  CHECK(mean == doctest::Approx(sp * sp / (3.0 * d)).epsilon(0.1));
  CHECK(var == doctest::Approx(sp * sp / 3.0).epsilon(0.03));
  CHECK(position_residual_moments(10.0, 0.0) == std::pair<double, double>{0.0, 0.0});
}

TEST_CASE("position residual moments match an independent Monte-Carlo estimate") {
  const double d = 4.0, sp = 3.0;
  Rng rng(1234);
  std::normal_distribution<double> n(0.0, sp / std::sqrt(3.0));
  const int count = 400000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < count; ++i) {
    const double zeta = Vec3(n(rng), n(rng), d + n(rng)).norm() - d;
    s += zeta;
    s2 += zeta * zeta;
  }
  const double m = s / count;
  const double v = s2 / count - m * m;
  const auto [mean, var] = position_residual_moments(d, sp);
  CHECK(mean == doctest::Approx(m).epsilon(0.03));
  CHECK(var == doctest::Approx(v).epsilon(0.03));
}

TEST_CASE("error conversion combines range and position spread") {
  const RangingChannel ch = with_sigma_d_table(RangingChannel{});
  const auto exact = convert_error(50.0, 0.0, ch);
  CHECK(exact.mu_cd == 0.0);
  CHECK(exact.sigma_cd == doctest::Approx(ch.sigma_d(50.0)));

  const auto [m, v] = position_residual_moments(50.0, 2.0);
  const auto c = convert_error(50.0, 2.0, ch);
  CHECK(std::abs(c.mu_cd) == doctest::Approx(std::abs(m)));
  CHECK(c.sigma_cd == doctest::Approx(std::sqrt(v + ch.sigma_d(50.0) * ch.sigma_d(50.0))));

  ErrorConverter cached(ch.sigma_d);
  const auto a = cached(50.0, 2.0);
  CHECK(a.sigma_cd == doctest::Approx(c.sigma_cd).epsilon(0.01));
  cached(50.2, 2.01);
  CHECK(cached.cache_size() >= 1);
}
