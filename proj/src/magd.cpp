#include "swarmloc/magd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace swarmloc {
namespace {

// Smallest sigma_cd fed to the weight formula; a noiseless channel with an
// exact anchor position would otherwise give sigma_cd = 0.
constexpr double kSigmaFloor = 1e-9;

struct TrustedAnchor {
  Vec3 pos;
  double distance;
  double mu;
  double weight;  // w_n^e * r_n
};

double mean_of_last(const std::vector<double>& v, std::size_t count) {
  const auto first = v.end() - static_cast<std::ptrdiff_t>(count);
  return std::accumulate(first, v.end(), 0.0) / static_cast<double>(count);
}

double mean_residual(std::span<const TrustedAnchor> anchors, const Vec3& p) {
  double s = 0.0;
  for (const auto& a : anchors)
    s += std::abs((p - a.pos).norm() - a.distance + a.mu) * a.weight;
  return s / static_cast<double>(anchors.size());
}

}  // namespace

void MagdConfig::validate() const {
  if (!(eps_min_t0 > 0.0) || !(eps_max_t0 >= eps_min_t0))
    throw ConfigError("magd: require eps_max_t0 >= eps_min_t0 > 0");
  if (!(eps_min_t > 0.0)) throw ConfigError("magd.eps_min_t must be > 0");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw ConfigError("magd.beta1 must be in (0, 1)");
  if (!(beta2 >= 0.0)) throw ConfigError("magd.beta2 must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("magd.momentum must be in [0, 1)");
  if (!(theta > 0.0)) throw ConfigError("magd.theta must be > 0");
  if (max_iterations < 1) throw ConfigError("magd.max_iterations must be >= 1");
  if (window < 1) throw ConfigError("magd.window must be >= 1");
  if (fixed_alpha && !(*fixed_alpha > 0.0)) throw ConfigError("magd.fixed_alpha must be > 0");
}

MagdState magd_init(const MagdConfig& cfg, std::size_t n_anchors, const Vec3& p_init) {
  if (n_anchors == 0) throw NoAnchorError("magd_init: no anchors");
  MagdState s;
  s.p_hat = p_init;
  s.alpha_hat = cfg.fixed_alpha ? *cfg.fixed_alpha
                                : std::max(cfg.eps_max_t0 / static_cast<double>(n_anchors), cfg.eps_min_t0);
  s.initialized = true;
  return s;
}

InnerDescentResult magd_inner_descent(const MagdState& state, const ObservationSet& obs,
                                      std::span<const ConvertedError> conversions,
                                      std::span<const double> weights,
                                      std::span<const double> reputations,
                                      const MagdConfig& cfg) {
  const std::size_t total = obs.size();
  if (conversions.size() != total || weights.size() != total || reputations.size() != total)
    throw DomainError("magd_inner_descent: per-anchor inputs differ in length");

  std::vector<TrustedAnchor> anchors;
  anchors.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const double wr = weights[i] * reputations[i];
    if (wr > 0.0) {
      const auto& r = obs.reports[i];
      anchors.push_back({r.reported_pos, r.measured_distance, conversions[i].mu_cd, wr});
    }
  }
  if (anchors.empty()) throw NoTrustedAnchorError("magd_inner_descent: no trusted anchor");
  const auto n = static_cast<double>(anchors.size());

  InnerDescentResult out;
  Vec3 p = state.p_hat;
  Vec3 last_step = state.prev_displacement;
  double alpha = state.alpha_hat;
  double d_prev = std::numeric_limits<double>::infinity();
  double d_bar = mean_residual(anchors, p);

  for (int i = 0; i < cfg.max_iterations; ++i) {
    Vec3 grad = Vec3::Zero();
    for (const auto& a : anchors) {
      Vec3 diff = p - a.pos;
      double dist = diff.norm();
      if (dist == 0.0) {
        diff = Vec3(1e-6, 0.0, 0.0);
        dist = 1e-6;
      }
      grad += diff * (a.weight * (dist - a.distance + a.mu) / dist);
    }
    const double gn = grad.norm();
    if (gn == 0.0) break;

    const Vec3 step = cfg.momentum * last_step - (alpha / n) * (grad / gn);
    p += step;
    last_step = step;
    ++out.iterations;

    d_bar = mean_residual(anchors, p);
    if (d_bar > d_prev) {
      alpha *= cfg.beta1;
    } else if (d_bar == 0.0 || (d_prev - d_bar) / d_bar <= cfg.theta) {
      break;
    }
    d_prev = d_bar;
  }

  out.p_hat = p;
  out.d_bar = d_bar;
  out.alpha_end = alpha;
  out.last_displacement = last_step;
  return out;
}

void magd_adapt(MagdState& state, const Vec3& p_new, double d_bar, std::size_t n_anchors,
                const MagdConfig& cfg) {
  const double v = (p_new - state.p_hat).norm();
  state.p_hat = p_new;
  state.speed_history.push_back(v);
  state.residual_history.push_back(d_bar);
  state.t += 1;
  const auto t = static_cast<double>(state.t);
  state.mean_speed += (v - state.mean_speed) / t;
  state.mean_residual += (d_bar - state.mean_residual) / t;

  if (cfg.fixed_alpha) {
    state.alpha_hat = *cfg.fixed_alpha;
    return;
  }
  if (state.t == 1 || n_anchors == 0) return;

  const auto phi = static_cast<std::size_t>(std::min(state.t, cfg.window));
  const double v_bar = state.mean_speed;
  const double d_bar_bar = state.mean_residual;
  const double n = static_cast<double>(n_anchors);

  if (d_bar_bar > 0.0 && std::abs(d_bar - d_bar_bar) / d_bar_bar <= 0.5) {
    state.alpha_hat -= cfg.beta2 * v_bar;
    state.alpha_hat = std::max(state.alpha_hat, std::max(cfg.eps_min_t / n, v_bar / 2.0));
  }

  if (d_bar_bar > 0.0 && v_bar > 0.0) {
    const double rho_d = mean_of_last(state.residual_history, phi) / d_bar_bar;
    const double rho_v = mean_of_last(state.speed_history, phi) / v_bar;
    if (rho_v > 0.0) {
      const double rho = std::sqrt(rho_d / rho_v);
      if (rho > 1.5) {
        state.alpha_hat *= rho;
        if (cfg.cap_enlargement) state.alpha_hat = std::min(state.alpha_hat, cfg.eps_max_t0);
      }
    }
  }
}

Vec3 centroid_of_reports(const ObservationSet& obs) {
  Vec3 c = Vec3::Zero();
  for (const auto& r : obs.reports) c += r.reported_pos;
  return obs.empty() ? c : Vec3(c / static_cast<double>(obs.size()));
}

MagdTickResult magd_tick(MagdState& state, const ObservationSet& obs,
                         std::span<const double> reputations, const ErrorConverter& converter,
                         const MagdConfig& cfg) {
  if (reputations.size() != obs.size())
    throw DomainError("magd_tick: one reputation per report required");
  MagdTickResult out;
  out.conversions.reserve(obs.size());
  for (const auto& r : obs.reports)
    out.conversions.push_back(converter(r.measured_distance, r.reported_sigma_p));

  // Trusted subset: weights are normalized over it alone.
  std::vector<std::size_t> trusted;
  for (std::size_t i = 0; i < obs.size(); ++i)
    if (reputations[i] > 0.0) trusted.push_back(i);

  if (trusted.empty()) {
    out.coasting = true;
    out.p_hat = state.p_hat;
    out.alpha_hat = state.alpha_hat;
    out.d_bar = state.residual_history.empty() ? 0.0 : state.residual_history.back();
    return out;
  }

  if (!state.initialized) {
    ObservationSet first;
    for (auto i : trusted) first.reports.push_back(obs.reports[i]);
    state = magd_init(cfg, trusted.size(), centroid_of_reports(first));
  }
  if (cfg.fixed_alpha) state.alpha_hat = *cfg.fixed_alpha;

  std::vector<double> sigmas;
  sigmas.reserve(trusted.size());
  for (auto i : trusted) sigmas.push_back(std::max(out.conversions[i].sigma_cd, kSigmaFloor));
  const auto w_trusted = error_weights(sigmas);
  std::vector<double> weights(obs.size(), 0.0);
  for (std::size_t k = 0; k < trusted.size(); ++k) weights[trusted[k]] = w_trusted[k];

  const auto inner = magd_inner_descent(state, obs, out.conversions, weights, reputations, cfg);
  state.prev_displacement = inner.last_displacement;
  if (cfg.persist_inner_discount) state.alpha_hat = inner.alpha_end;
  const Vec3 before = state.p_hat;
  magd_adapt(state, inner.p_hat, inner.d_bar, trusted.size(), cfg);

  out.p_hat = state.p_hat;
  out.alpha_hat = state.alpha_hat;
  out.d_bar = inner.d_bar;
  out.speed = (inner.p_hat - before).norm();
  out.iterations = inner.iterations;
  return out;
}

}  // namespace swarmloc
