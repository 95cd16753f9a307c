#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fairalloc/core.hpp"

namespace fairalloc {

/// Deterministic randomness keyed by a 64-bit seed. Every (replication, agent)
/// pair gets its own generator, so draws never depend on which worker runs
/// which replication or in what order.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64 stream(std::uint64_t replication, std::uint64_t agent) const;

  /// Uniform double in [0, 1) from the top 53 bits of one draw.
  static double uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
};

/// Normal(mean, variance) cut into `buckets` equal-width bins over mean +- 4 sd.
/// Atoms sit at bin midpoints (raised to a small positive floor when the bin is
/// not positive) and carry the bin's normal mass, renormalized.
TypeDistribution discretized_gaussian(double mean, double variance, int buckets);

/// Poisson(lambda) on {1, ..., cap}; the mass at 0 and above cap goes to 1.
TypeDistribution truncated_poisson(double lambda, int cap);

/// Equal mass on lo and hi (one atom when they coincide).
TypeDistribution two_point_uniform(double lo, double hi);

/// Mean demands of the six food-bank counties, normalized to total about 100.
inline constexpr std::array<double, 6> kFbstMeans{26.72, 34.55, 12.09, 12.35, 2.96, 11.31};

/// Unit-size county profiles with discretized Gaussian demand. The published
/// data has no variances; `variance_ratio` * mean is used instead.
std::vector<AgentProfile> fbst_profiles(double variance_ratio = 0.2, int buckets = 20);

/// Product weights for the nine-resource experiments.
inline constexpr std::array<double, 9> kProductWeights{3.9, 3.5, 3.2, 3.0, 2.8, 2.7, 1.9, 1.2, 0.2};

/// Uniform distribution over `count` distinct vectors whose coordinate k is
/// weights[k] or 0 with equal odds. All-zero and repeated draws are redrawn.
TypeDistribution bernoulli_preference_profiles(std::span<const double> weights, int count, std::mt19937_64& gen);

/// One inverse-CDF draw per agent from its own stream.
std::vector<AgentType> sample_episode(const Instance& instance, const SeededRng& rng, std::uint64_t replication);

/// Inverse-CDF draw of one atom for a uniform u in [0, 1).
const AgentType& draw(const TypeDistribution& distribution, double u);

}  // namespace fairalloc
