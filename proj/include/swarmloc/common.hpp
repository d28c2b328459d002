#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace swarmloc {

/// Position or displacement in meters.
using Vec3 = Eigen::Vector3d;

using UavId = std::uint32_t;

/// Every stochastic operation takes an explicit engine so that results are a
/// pure function of (inputs, engine state).
using Rng = std::mt19937_64;

// Error hierarchy. Domain errors flag invalid numeric inputs; the geometry
// errors are recoverable by callers that resample or coast.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularGeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateGeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoAnchorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoTrustedAnchorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream (`cell`, `rep`) under a master seed. The derivation is
/// independent of scheduling, so sweeps reproduce under any parallelism.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell,
                                    std::uint64_t rep) noexcept {
  return mix64(mix64(mix64(master) ^ cell) ^ (rep + 0x632be59bd9b4e019ULL));
}

inline bool is_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace swarmloc
