#include "fairalloc/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairalloc {

namespace {

// Smallest demand a Gaussian bin is allowed to carry.
constexpr double kDemandFloor = 1e-6;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

std::mt19937_64 SeededRng::stream(std::uint64_t replication, std::uint64_t agent) const {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed_), hi(seed_), lo(replication), hi(replication), lo(agent), hi(agent)};
  return std::mt19937_64(seq);
}

TypeDistribution discretized_gaussian(double mean, double variance, int buckets) {
  if (!(variance > 0.0)) throw std::invalid_argument("gaussian variance must be positive");
  if (buckets < 2) throw std::invalid_argument("gaussian needs at least 2 buckets");
  const double sd = std::sqrt(variance);
  const double lo = mean - 4.0 * sd;
  const double width = 8.0 * sd / buckets;

  TypeDistribution d;
  double total = 0.0;
  for (int b = 0; b < buckets; ++b) {
    const double left = lo + b * width;
    const double right = left + width;
    const double mass = normal_cdf((right - mean) / sd) - normal_cdf((left - mean) / sd);
    const AgentType atom = AgentType::demand(std::max(left + width / 2.0, kDemandFloor));
    total += mass;
    if (auto idx = d.find(atom)) {
      d.probabilities[*idx] += mass;
    } else {
      d.support.push_back(atom);
      d.probabilities.push_back(mass);
    }
  }
  for (double& p : d.probabilities) p /= total;
  return d;
}

TypeDistribution truncated_poisson(double lambda, int cap) {
  if (!(lambda > 0.0)) throw std::invalid_argument("poisson lambda must be positive");
  if (cap < 1) throw std::invalid_argument("poisson cap must be at least 1");
  TypeDistribution d;
  double kept = 0.0;
  for (int j = 1; j <= cap; ++j) {
    const double p = std::exp(-lambda + j * std::log(lambda) - std::lgamma(j + 1.0));
    d.support.push_back(AgentType::demand(j));
    d.probabilities.push_back(p);
    if (j >= 2) kept += p;
  }
  d.probabilities[0] = 1.0 - kept;
  return d;
}

TypeDistribution two_point_uniform(double lo, double hi) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw std::invalid_argument("two-point demands must be positive");
  if (lo == hi) return {{AgentType::demand(lo)}, {1.0}};
  return {{AgentType::demand(lo), AgentType::demand(hi)}, {0.5, 0.5}};
}

std::vector<AgentProfile> fbst_profiles(double variance_ratio, int buckets) {
  std::vector<AgentProfile> out;
  for (double m : kFbstMeans) out.push_back({1.0, discretized_gaussian(m, m * variance_ratio, buckets)});
  return out;
}

TypeDistribution bernoulli_preference_profiles(std::span<const double> weights, int count, std::mt19937_64& gen) {
  if (count < 1) throw std::invalid_argument("need at least one preference profile");
  std::size_t positive = 0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("product weights must be non-negative");
    if (w > 0.0) ++positive;
  }
  if (positive == 0) throw std::invalid_argument("some product weight must be positive");
  if (positive < 64 && static_cast<double>(count) > std::ldexp(1.0, static_cast<int>(positive)) - 1.0) {
    throw std::invalid_argument("more profiles requested than distinct non-zero vectors exist");
  }

  TypeDistribution d;
  while (d.size() < static_cast<std::size_t>(count)) {
    std::vector<double> theta(weights.size());
    bool any = false;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      theta[k] = SeededRng::uniform(gen) < 0.5 ? weights[k] : 0.0;
      any = any || theta[k] > 0.0;
    }
    if (!any) continue;
    AgentType t = AgentType::preferences(std::move(theta));
    if (d.find(t)) continue;
    d.support.push_back(std::move(t));
  }
  d.probabilities.assign(d.size(), 1.0 / count);
  return d;
}

const AgentType& draw(const TypeDistribution& distribution, double u) {
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t s = 0; s < distribution.size(); ++s) {
    const double p = distribution.probabilities[s];
    if (p <= 0.0) continue;
    acc += p;
    last_positive = s;
    if (u < acc) return distribution.support[s];
  }
  // Rounding left the cumulative sum a hair under 1.
  return distribution.support[last_positive];
}

std::vector<AgentType> sample_episode(const Instance& instance, const SeededRng& rng, std::uint64_t replication) {
  std::vector<AgentType> out;
  out.reserve(instance.agent_count());
  for (std::size_t i = 0; i < instance.agent_count(); ++i) {
    auto gen = rng.stream(replication, i);
    out.push_back(draw(instance.agents[i].distribution, SeededRng::uniform(gen)));
  }
  return out;
}

}  // namespace fairalloc
