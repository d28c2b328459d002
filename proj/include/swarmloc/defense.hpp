#pragma once

#include "swarmloc/common.hpp"
#include "swarmloc/localizers.hpp"
#include "swarmloc/observation.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>

namespace swarmloc {

struct TadConfig {
  double reward = 0.3;        // lambda_r
  double penalty = -0.7;      // lambda_p
  double forget = 0.5;        // gamma
  double confidence = 0.95;   // eps_t
  double sigma_p_min = 0.1;   // m, floor on sigma_cd
  // r(t) = gamma * (r(t-1) + 1) - 1 + r_hat instead of the recovering form.
  bool printed_update = false;

  void validate() const;
};

/// Local reputation of neighbors as seen by `owner`. Unseen neighbors are
/// fully trusted.
class ReputationTable {
 public:
  ReputationTable() = default;
  explicit ReputationTable(UavId owner) : owner_(owner) {}

  UavId owner() const { return owner_; }
  double get(UavId neighbor) const;
  bool contains(UavId neighbor) const { return r_.contains(neighbor); }
  void set(UavId neighbor, double r);
  const std::map<UavId, double>& entries() const { return r_; }

  friend bool operator==(const ReputationTable&, const ReputationTable&) = default;

 private:
  UavId owner_ = 0;
  std::map<UavId, double> r_;
};

struct ReputationSnapshot {
  ReputationTable table;
  int uploaded_at = 0;
};

/// Shared store of the latest uploaded table per UAV. Readers receive an
/// immutable snapshot, so they never see a half-written table.
class CloudRegistry {
 public:
  void upload(const ReputationTable& table, int t);
  std::shared_ptr<const ReputationSnapshot> snapshot_of(UavId uploader) const;
  /// All snapshots at the time of the call, keyed by uploader.
  std::map<UavId, std::shared_ptr<const ReputationSnapshot>> view() const;
  std::size_t size() const;

 private:
  mutable std::shared_mutex mu_;
  std::map<UavId, std::shared_ptr<const ReputationSnapshot>> snaps_;
};

/// P(|X| <= e) for X ~ N(mu_cd, sigma_cd^2).
double plausibility(double e_hat, const ConvertedError& conv);

/// One reputation step from r_prev given the reward or penalty r_hat.
double reputation_step(double r_prev, double r_hat, const TadConfig& cfg);

/// Scores one neighbor report against this tick's estimate and updates
/// `table`. Residuals outside the confidence envelope are penalized.
double tad_update(ReputationTable& table, const AnchorReport& report, const Vec3& p_hat,
                  ConvertedError conv, const TadConfig& cfg);

enum class PropagationFn { kSquare, kIdentity };

double apply_propagation_fn(PropagationFn f, double x);

/// Blends the local reputation of `neighbor` with the informants' uploaded
/// opinions, each weighted by how much the owner trusts the informant.
double propagate_reputation(const ReputationTable& local,
                            const std::map<UavId, std::shared_ptr<const ReputationSnapshot>>& cloud,
                            UavId neighbor, PropagationFn f = PropagationFn::kSquare);

double propagate_reputation(const ReputationTable& local, const CloudRegistry& cloud, UavId neighbor,
                            PropagationFn f = PropagationFn::kSquare);

void upload_reputation(const ReputationTable& table, CloudRegistry& cloud, int t);

}  // namespace swarmloc
