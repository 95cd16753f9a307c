#include "fairalloc/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fairalloc/kernels.hpp"

namespace fairalloc {

AgentType AgentType::demand(double theta) {
  AgentType t;
  t.kind_ = Kind::ScalarDemand;
  t.values_ = {theta};
  return t;
}

AgentType AgentType::preferences(std::vector<double> theta) {
  AgentType t;
  t.kind_ = Kind::PreferenceVector;
  t.values_ = std::move(theta);
  return t;
}

std::string to_string(const AgentType& type) {
  std::ostringstream os;
  os.precision(10);
  if (type.is_demand()) {
    os << type.demand();
    return os.str();
  }
  os << '(';
  for (std::size_t k = 0; k < type.dimension(); ++k) {
    if (k != 0) os << ", ";
    os << type.values()[k];
  }
  os << ')';
  return os.str();
}

double TypeDistribution::probability_of(const AgentType& type) const {
  const auto idx = find(type);
  return idx ? probabilities[*idx] : 0.0;
}

std::optional<std::size_t> TypeDistribution::find(const AgentType& type) const {
  for (std::size_t j = 0; j < support.size(); ++j) {
    if (support[j] == type) return j;
  }
  return std::nullopt;
}

std::vector<double> TypeDistribution::mean() const {
  if (support.empty()) return {};
  std::vector<double> m(support.front().dimension(), 0.0);
  for (std::size_t j = 0; j < support.size(); ++j) {
    const auto v = support[j].values();
    for (std::size_t k = 0; k < m.size() && k < v.size(); ++k) m[k] += probabilities[j] * v[k];
  }
  return m;
}

double TypeDistribution::median() const {
  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return support[a].demand() < support[b].demand(); });
  double cdf = 0.0;
  for (std::size_t j : order) {
    cdf += probabilities[j];
    // Guard against the CDF landing a few ulps under 1/2 on symmetric supports.
    if (cdf >= 0.5 - 1e-12) return support[j].demand();
  }
  return order.empty() ? 0.0 : support[order.back()].demand();
}

double TypeDistribution::variance() const {
  const double mu = mean().at(0);
  double v = 0.0;
  for (std::size_t j = 0; j < support.size(); ++j) {
    const double d = support[j].demand() - mu;
    v += probabilities[j] * d * d;
  }
  return v;
}

std::string to_string(UtilityFamily family) {
  return family == UtilityFamily::FillingRatio ? "filling_ratio" : "linear";
}

UtilityFamily parse_family(const std::string& name) {
  if (name == "filling_ratio") return UtilityFamily::FillingRatio;
  if (name == "linear") return UtilityFamily::Linear;
  throw std::invalid_argument("unknown utility family '" + name + "'");
}

double utility(std::span<const double> x, const AgentType& type, UtilityFamily family) {
  if (family == UtilityFamily::FillingRatio) {
    if (x.size() != 1 || !type.is_demand()) {
      throw std::invalid_argument("filling-ratio utility needs a scalar allocation and demand");
    }
    const double theta = type.demand();
    if (!(theta > 0.0)) throw std::invalid_argument("scalar demand must be positive");
    return std::min(x[0] / theta, 1.0);
  }
  if (type.is_demand() || type.dimension() != x.size()) {
    throw std::invalid_argument("linear utility needs a preference vector matching the allocation");
  }
  return kernels::active().dot(x.data(), type.values().data(), x.size());
}

std::string to_string(const Violation& violation) {
  if (violation.agent) return "agent " + std::to_string(*violation.agent) + ": " + violation.message;
  return violation.message;
}

std::vector<Violation> validate_instance(const Instance& instance) {
  std::vector<Violation> out;
  auto report = [&](std::optional<std::size_t> agent, std::string msg) {
    out.push_back({agent, std::move(msg)});
  };

  const std::size_t k = instance.resource_count();
  if (k == 0) report(std::nullopt, "resource count K must be at least 1");
  for (std::size_t r = 0; r < k; ++r) {
    const double b = instance.resources.budgets[r];
    if (!(b >= 0.0) || !std::isfinite(b)) {
      report(std::nullopt, "budget for resource " + std::to_string(r) + " must be finite and non-negative");
    }
  }
  if (!instance.resources.names.empty() && instance.resources.names.size() != k) {
    report(std::nullopt, "resource names must match the resource count");
  }
  if (instance.family == UtilityFamily::FillingRatio && k != 1) {
    report(std::nullopt, "FillingRatio requires K=1");
  }
  if (instance.agents.empty()) report(std::nullopt, "instance needs at least one agent");

  for (std::size_t i = 0; i < instance.agents.size(); ++i) {
    const AgentProfile& a = instance.agents[i];
    if (!(a.size > 0.0) || !std::isfinite(a.size)) report(i, "size must be positive");
    const TypeDistribution& d = a.distribution;
    if (d.support.empty()) {
      report(i, "type distribution has empty support");
      continue;
    }
    if (d.support.size() != d.probabilities.size()) {
      report(i, "support and probabilities differ in length");
      continue;
    }
    double total = 0.0;
    bool negative = false;
    for (double p : d.probabilities) {
      if (!(p >= 0.0)) negative = true;
      total += p;
    }
    if (negative) report(i, "probabilities must be non-negative");
    if (std::fabs(total - 1.0) > 1e-12) {
      std::ostringstream os;
      os.precision(15);
      os << "probabilities sum to " << total << ", expected 1";
      report(i, os.str());
    }
    for (std::size_t j = 0; j < d.support.size(); ++j) {
      for (std::size_t l = j + 1; l < d.support.size(); ++l) {
        if (d.support[j] == d.support[l]) {
          report(i, "support atoms " + std::to_string(j) + " and " + std::to_string(l) + " are equal");
        }
      }
      const AgentType& t = d.support[j];
      if (instance.family == UtilityFamily::FillingRatio) {
        if (!t.is_demand()) {
          report(i, "FillingRatio requires scalar demands (atom " + std::to_string(j) + ")");
        } else if (!(t.demand() > 0.0) || !std::isfinite(t.demand())) {
          report(i, "scalar demand must be positive (atom " + std::to_string(j) + ")");
        }
      } else {
        if (t.is_demand() || t.dimension() != k) {
          report(i, "Linear requires preference vectors of length K (atom " + std::to_string(j) + ")");
          continue;
        }
        bool positive = false;
        bool bad = false;
        for (double v : t.values()) {
          if (v > 0.0) positive = true;
          if (!(v >= 0.0) || !std::isfinite(v)) bad = true;
        }
        if (bad) report(i, "preferences must be finite and non-negative (atom " + std::to_string(j) + ")");
        if (!positive) report(i, "preference vector needs a positive entry (atom " + std::to_string(j) + ")");
      }
    }
  }
  return out;
}

namespace {

std::string join_violations(const std::vector<Violation>& v) {
  std::string s = "invalid instance";
  for (const auto& x : v) s += "; " + to_string(x);
  return s;
}

}  // namespace

InvalidInstance::InvalidInstance(std::vector<Violation> violations)
    : std::invalid_argument(join_violations(violations)), violations_(std::move(violations)) {}

void require_valid(const Instance& instance) {
  auto v = validate_instance(instance);
  if (!v.empty()) throw InvalidInstance(std::move(v));
}

double effective_size(const Instance& instance) {
  double s = 0.0;
  for (const auto& a : instance.agents) s += a.size;
  return s;
}

double lipschitz_bound(const Instance& instance) {
  if (instance.family == UtilityFamily::FillingRatio) {
    double min_demand = std::numeric_limits<double>::infinity();
    for (const auto& a : instance.agents) {
      for (const auto& t : a.distribution.support) min_demand = std::min(min_demand, t.demand());
    }
    return 1.0 / min_demand;
  }
  double l = 0.0;
  for (const auto& a : instance.agents) {
    for (const auto& t : a.distribution.support) {
      double norm1 = 0.0;
      for (double v : t.values()) norm1 += v;
      l = std::max(l, norm1);
    }
  }
  return l;
}

std::vector<double> consumption(const Allocation& x, const Instance& instance) {
  std::vector<double> used(x.resources(), 0.0);
  for (std::size_t i = 0; i < x.agents(); ++i) {
    const double s = instance.agents[i].size;
    for (std::size_t k = 0; k < x.resources(); ++k) used[k] += s * x(i, k);
  }
  return used;
}

bool is_feasible(const Allocation& x, const Instance& instance) {
  if (x.agents() != instance.agent_count() || x.resources() != instance.resource_count()) return false;
  for (double v : x.flat()) {
    if (!(v >= 0.0)) return false;
  }
  const auto used = consumption(x, instance);
  for (std::size_t k = 0; k < used.size(); ++k) {
    if (used[k] > instance.resources.budgets[k] + kFeasibilityTolerance) return false;
  }
  return true;
}

}  // namespace fairalloc
