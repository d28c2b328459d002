#include "swarmloc/magd.hpp"

#include <doctest.h>

#include <cmath>

using namespace swarmloc;

namespace {

ObservationSet ring_reports(const Vec3& target, int n, double radius = 30.0) {
  ObservationSet obs;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    const Vec3 p = target + Vec3(radius * std::cos(a), radius * std::sin(a), (i % 3 - 1) * 8.0);
    obs.reports.push_back({static_cast<UavId>(i), p, 0.5, (p - target).norm()});
  }
  return obs;
}

const ErrorConverter& converter() {
  static const ErrorConverter c(with_sigma_d_table(RangingChannel{}).sigma_d);
  return c;
}

}  // namespace

TEST_CASE("initial step size") {
  MagdConfig cfg;
  CHECK(magd_init(cfg, 5, Vec3::Zero()).alpha_hat == doctest::Approx(10.0));
  CHECK(magd_init(cfg, 20, Vec3::Zero()).alpha_hat == doctest::Approx(5.0));
  cfg.fixed_alpha = 2.5;
  CHECK(magd_init(cfg, 20, Vec3::Zero()).alpha_hat == 2.5);
  CHECK_THROWS_AS(magd_init(cfg, 0, Vec3::Zero()), NoAnchorError);
}

TEST_CASE("config validation") {
  MagdConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.beta1 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = MagdConfig{};
  cfg.eps_min_t0 = 60.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("inner descent lowers the residual and moves toward the target") {
  const Vec3 target(100.0, 100.0, 5.0);
  const auto obs = ring_reports(target, 12);
  MagdConfig cfg;
  auto state = magd_init(cfg, obs.size(), target + Vec3(12.0, -9.0, 2.0));
  std::vector<ConvertedError> conv(obs.size());
  std::vector<double> w(obs.size(), 1.0), r(obs.size(), 1.0);
  const auto before = (state.p_hat - target).norm();
  const auto out = magd_inner_descent(state, obs, conv, w, r, cfg);
  CHECK((out.p_hat - target).norm() < before);
  CHECK(out.iterations >= 1);
  CHECK(out.iterations <= cfg.max_iterations);
}

TEST_CASE("untrusted anchors have no effect on the trajectory") {
  const Vec3 target(50.0, 60.0, 5.0);
  auto obs = ring_reports(target, 10);
  std::vector<ConvertedError> conv(obs.size() + 1);
  std::vector<double> w(obs.size() + 1, 1.0), r(obs.size() + 1, 1.0);
  MagdConfig cfg;
  auto state = magd_init(cfg, obs.size(), target + Vec3(5.0, 5.0, 0.0));
  std::vector<double> w0(w.begin(), w.end() - 1), r0(r.begin(), r.end() - 1);
  std::vector<ConvertedError> c0(conv.begin(), conv.end() - 1);
  const auto clean = magd_inner_descent(state, obs, c0, w0, r0, cfg);
  obs.reports.push_back({99, target + Vec3(200, 200, 5), 0.1, 3.0});
  r.back() = 0.0;
  const auto with_zero = magd_inner_descent(state, obs, conv, w, r, cfg);
  CHECK(clean.p_hat == with_zero.p_hat);
  CHECK(clean.iterations == with_zero.iterations);
  r.assign(r.size(), 0.0);
  CHECK_THROWS_AS(magd_inner_descent(state, obs, conv, w, r, cfg), NoTrustedAnchorError);
}

TEST_CASE("step size stays positive, finite and capped under random histories") {
  MagdConfig cfg;
  Rng rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int seq = 0; seq < 200; ++seq) {
    auto s = magd_init(cfg, 10, Vec3::Zero());
    for (int t = 0; t < 100; ++t) {
      const Vec3 p = s.p_hat + Vec3(u(rng), u(rng), u(rng)) * (u(rng) < 0.1 ? 40.0 : 2.0);
      const double d_bar = u(rng) < 0.1 ? 50.0 * u(rng) : 2.0 * u(rng) + 0.01;
      magd_adapt(s, p, d_bar, 10, cfg);
      REQUIRE(std::isfinite(s.alpha_hat));
      CHECK(s.alpha_hat > 0.0);
      CHECK(s.alpha_hat <= std::max(cfg.eps_max_t0, 5.0 * 10.0));
    }
    CHECK(s.t == 100);
    CHECK(s.speed_history.size() == 100);
  }
}

TEST_CASE("stable residuals shrink the step down to its floor") {
  MagdConfig cfg;
  auto s = magd_init(cfg, 10, Vec3::Zero());
  for (int t = 0; t < 500; ++t) magd_adapt(s, s.p_hat + Vec3(1.0, 0.0, 0.0), 1.0, 10, cfg);
  CHECK(s.mean_speed == doctest::Approx(1.0));
  CHECK(s.alpha_hat == doctest::Approx(std::max(cfg.eps_min_t / 10.0, 0.5)));
}

TEST_CASE("a residual surge enlarges the step") {
  MagdConfig cfg;
  cfg.window = 2;
  auto s = magd_init(cfg, 10, Vec3::Zero());
  for (int t = 0; t < 20; ++t) magd_adapt(s, s.p_hat + Vec3(1.0, 0.0, 0.0), 1.0, 10, cfg);
  const double before = s.alpha_hat;
  magd_adapt(s, s.p_hat + Vec3(1.0, 0.0, 0.0), 20.0, 10, cfg);
  CHECK(s.alpha_hat > before);
}

TEST_CASE("fixed step baseline keeps its step") {
  MagdConfig cfg;
  cfg.fixed_alpha = 1.5;
  auto s = magd_init(cfg, 10, Vec3::Zero());
  for (int t = 0; t < 30; ++t) magd_adapt(s, s.p_hat + Vec3(3.0, 0.0, 0.0), 10.0 * t, 10, cfg);
  CHECK(s.alpha_hat == 1.5);
}

TEST_CASE("tick tracks a static target and coasts without trust") {
  const Vec3 target(120.0, 80.0, 5.0);
  const auto obs = ring_reports(target, 15);
  MagdConfig cfg;
  MagdState s;
  std::vector<double> r(obs.size(), 1.0);
  for (int t = 0; t < 20; ++t) magd_tick(s, obs, r, converter(), cfg);
  CHECK((s.p_hat - target).norm() < 1.0);

  const Vec3 held = s.p_hat;
  std::vector<double> none(obs.size(), 0.0);
  const auto out = magd_tick(s, obs, none, converter(), cfg);
  CHECK(out.coasting);
  CHECK(out.p_hat == held);
  CHECK_THROWS_AS(magd_tick(s, obs, std::vector<double>(3, 1.0), converter(), cfg), DomainError);
}
