#include "swarmloc/channel.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace swarmloc;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Closed form for the ranged-distance spread: with RSSI noise N(0, s^2) the
// ranged distance is d * exp(-k n), k = ln(10) / (10 n_p), which is
// lognormal for fixed s. The spread s = gamma_d * u, u ~ U(lo, hi), is then
// integrated out numerically.
double sigma_d_oracle(const RangingChannel& ch, double d) {
  const double k = std::log(10.0) / (10.0 * ch.path_loss_exponent);
  const double g = ch.distance_scaling * d * d + 1.0;
  const double lo = ch.sigma_min_rssi, hi = ch.sigma_max_rssi;
  const double m1 = simpson([&](double u) { return std::exp(0.5 * k * k * g * g * u * u); }, lo, hi) / (hi - lo);
  const double m2 = simpson([&](double u) { return std::exp(2.0 * k * k * g * g * u * u); }, lo, hi) / (hi - lo);
  return d * std::sqrt(m2 - m1 * m1);
}

}  // namespace

TEST_CASE("path loss reference values") {
  RangingChannel ch;
  CHECK(rssi_at_distance(ch, 1.0) == doctest::Approx(-30.0));
  CHECK(rssi_at_distance(ch, 10.0) == doctest::Approx(-60.0));
  CHECK(rssi_at_distance(ch, 100.0) == doctest::Approx(-90.0));
  CHECK(rssi_sigma_scale(ch, 100.0) == doctest::Approx(2.0));
}

TEST_CASE("path loss round trip") {
  RangingChannel ch;
  for (double d = 0.05; d < 1000.0; d *= 1.137) {
    const double back = invert_rssi(ch, rssi_at_distance(ch, d));
    CHECK(std::abs(back - d) <= 1e-9 * std::max(1.0, d));
  }
  CHECK_THROWS_AS(rssi_at_distance(ch, 0.0), DomainError);
  CHECK_THROWS_AS(rssi_at_distance(ch, -1.0), DomainError);
}

TEST_CASE("rssi spread stays in its scaled interval") {
  RangingChannel ch;
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const double d = 1.0 + (i % 200);
    const double s = sample_rssi_sigma(ch, d, rng);
    const double g = rssi_sigma_scale(ch, d);
    CHECK(s >= 0.5 * g);
    CHECK(s <= 2.0 * g);
  }
}

TEST_CASE("measured distance is positive, noiseless channel is exact") {
  RangingChannel ch;
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) CHECK(measure_distance(ch, 150.0, rng) > 0.0);
  RangingChannel quiet;
  quiet.sigma_min_rssi = quiet.sigma_max_rssi = 0.0;
  CHECK(measure_distance(quiet, 42.0, rng) == 42.0);
}

TEST_CASE("sigma_d table agrees with the lognormal oracle") {
  const RangingChannel ch = with_sigma_d_table(RangingChannel{});
  REQUIRE(ch.sigma_d.grid().size() == 200);
  CHECK(ch.sigma_d.grid().front() == doctest::Approx(1.0));
  CHECK(ch.sigma_d.grid().back() == doctest::Approx(200.0));
  for (double d : {10.0, 25.0, 50.0, 100.0, 150.0}) {
    const double oracle = sigma_d_oracle(ch, d);
    INFO("d = " << d << " oracle " << oracle << " table " << ch.sigma_d(d));
    CHECK(ch.sigma_d(d) == doctest::Approx(oracle).epsilon(0.04));
  }
}

TEST_CASE("sigma_d table is deterministic and grows with distance") {
  RangingChannel ch;
  const double grid[] = {10.0, 50.0, 100.0};
  const auto a = build_sigma_d_table(ch, grid, 10000, 99);
  const auto b = build_sigma_d_table(ch, grid, 10000, 99);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.values()[i] == b.values()[i]);
  CHECK(a(10.0) < a(50.0));
  CHECK(a(50.0) < a(100.0));
  CHECK(a(30.0) == doctest::Approx(0.5 * (a(10.0) + a(50.0))));
  CHECK(a(1.0) == a(10.0));
  CHECK(a(500.0) == a(100.0));
  CHECK_THROWS_AS(build_sigma_d_table(ch, grid, 100, 1), ConfigError);
}

TEST_CASE("position noise draws respect their bounds") {
  Rng rng(5);
  PositionNoiseModel power{0.1, 3.0, PositionNoiseModel::Bounds::kPower};
  PositionNoiseModel std_bounds{0.1, 3.0, PositionNoiseModel::Bounds::kStd};
  for (int i = 0; i < 10000; ++i) {
    const double a = power.draw(rng);
    CHECK(a >= std::sqrt(0.1));
    CHECK(a <= std::sqrt(3.0));
    const double b = std_bounds.draw(rng);
    CHECK(b >= 0.1);
    CHECK(b <= 3.0);
  }
}

TEST_CASE("position offset has total power sigma_p^2") {
  Rng rng(17);
  const int n = 200000;
  double power = 0.0;
  Vec3 mean = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec3 o = sample_position_offset(2.0, rng);
    power += o.squaredNorm();
    mean += o;
  }
  CHECK(power / n == doctest::Approx(4.0).epsilon(0.01));
  CHECK((mean / n).norm() < 0.02);
}
