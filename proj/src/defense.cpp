#include "swarmloc/defense.hpp"

#include <algorithm>
#include <cmath>

namespace swarmloc {
namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

void TadConfig::validate() const {
  if (!(reward >= 0.0 && penalty <= 0.0)) throw ConfigError("tad: require reward >= 0 >= penalty");
  if (!(forget > 0.0 && forget <= 1.0)) throw ConfigError("tad.forget must be in (0, 1]");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("tad.confidence must be in (0, 1)");
  if (!(sigma_p_min > 0.0)) throw ConfigError("tad.sigma_p_min must be > 0");
}

double ReputationTable::get(UavId neighbor) const {
  const auto it = r_.find(neighbor);
  return it == r_.end() ? 1.0 : it->second;
}

void ReputationTable::set(UavId neighbor, double r) { r_[neighbor] = clamp01(r); }

void CloudRegistry::upload(const ReputationTable& table, int t) {
  auto snap = std::make_shared<const ReputationSnapshot>(ReputationSnapshot{table, t});
  std::unique_lock lock(mu_);
  snaps_[table.owner()] = std::move(snap);
}

std::shared_ptr<const ReputationSnapshot> CloudRegistry::snapshot_of(UavId uploader) const {
  std::shared_lock lock(mu_);
  const auto it = snaps_.find(uploader);
  return it == snaps_.end() ? nullptr : it->second;
}

std::map<UavId, std::shared_ptr<const ReputationSnapshot>> CloudRegistry::view() const {
  std::shared_lock lock(mu_);
  return snaps_;
}

std::size_t CloudRegistry::size() const {
  std::shared_lock lock(mu_);
  return snaps_.size();
}

double plausibility(double e_hat, const ConvertedError& conv) {
  if (!(conv.sigma_cd > 0.0)) throw DomainError("plausibility: sigma_cd must be > 0");
  if (!(e_hat >= 0.0)) throw DomainError("plausibility: error magnitude must be >= 0");
  if (std::isinf(e_hat)) return 1.0;
  return normal_cdf((e_hat - conv.mu_cd) / conv.sigma_cd) -
         normal_cdf((-e_hat - conv.mu_cd) / conv.sigma_cd);
}

double reputation_step(double r_prev, double r_hat, const TadConfig& cfg) {
  const double r = cfg.printed_update ? cfg.forget * (r_prev + 1.0) - 1.0 + r_hat
                                      : cfg.forget * (r_prev - 1.0) + 1.0 + r_hat;
  return clamp01(r);
}

double tad_update(ReputationTable& table, const AnchorReport& report, const Vec3& p_hat,
                  ConvertedError conv, const TadConfig& cfg) {
  conv.sigma_cd = std::max(conv.sigma_cd, cfg.sigma_p_min);
  const double d_hat = (p_hat - report.reported_pos).norm();
  const double e_hat = std::abs(d_hat - report.measured_distance + conv.mu_cd);
  const double xi = plausibility(e_hat, conv);
  const double r_hat = xi > cfg.confidence ? cfg.penalty : cfg.reward;
  const double r = reputation_step(table.get(report.anchor_id), r_hat, cfg);
  table.set(report.anchor_id, r);
  return r;
}

double apply_propagation_fn(PropagationFn f, double x) {
  switch (f) {
    case PropagationFn::kSquare:
      return x * x;
    case PropagationFn::kIdentity:
      return x;
  }
  return x;
}

double propagate_reputation(const ReputationTable& local,
                            const std::map<UavId, std::shared_ptr<const ReputationSnapshot>>& cloud,
                            UavId neighbor, PropagationFn f) {
  const double own = local.get(neighbor);
  double num = 0.0, den = 0.0;
  bool any = false;
  for (const auto& [uploader, snap] : cloud) {
    if (uploader == local.owner() || uploader == neighbor || !snap) continue;
    if (!snap->table.contains(neighbor)) continue;
    any = true;
    const double trust = local.get(uploader);
    num += trust * snap->table.get(neighbor);
    den += trust;
  }
  if (!any || den <= 0.0) return own;
  return clamp01((apply_propagation_fn(f, num / den) + own) / 2.0);
}

double propagate_reputation(const ReputationTable& local, const CloudRegistry& cloud, UavId neighbor,
                            PropagationFn f) {
  return propagate_reputation(local, cloud.view(), neighbor, f);
}

void upload_reputation(const ReputationTable& table, CloudRegistry& cloud, int t) {
  cloud.upload(table, t);
}

}  // namespace swarmloc
