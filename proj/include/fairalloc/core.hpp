#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairalloc {

/// Absolute per-resource slack allowed when checking sum_i S_i X_i <= B.
inline constexpr double kFeasibilityTolerance = 1e-9;

/// Latent type of an agent: a scalar demand (filling-ratio family) or a
/// preference vector over K resources (linear family).
class AgentType {
 public:
  enum class Kind { ScalarDemand, PreferenceVector };

  AgentType() = default;

  static AgentType demand(double theta);
  static AgentType preferences(std::vector<double> theta);

  Kind kind() const { return kind_; }
  bool is_demand() const { return kind_ == Kind::ScalarDemand; }
  /// The scalar demand. Only meaningful for ScalarDemand types.
  double demand() const { return values_.front(); }
  std::span<const double> values() const { return values_; }
  std::size_t dimension() const { return values_.size(); }

  friend bool operator==(const AgentType&, const AgentType&) = default;

 private:
  Kind kind_ = Kind::ScalarDemand;
  std::vector<double> values_{1.0};
};

std::string to_string(const AgentType& type);

/// Finite distribution over agent types.
struct TypeDistribution {
  std::vector<AgentType> support;
  std::vector<double> probabilities;

  std::size_t size() const { return support.size(); }
  /// Probability of `type`, 0 if it is not an atom.
  double probability_of(const AgentType& type) const;
  /// Index of the atom equal to `type`, if any.
  std::optional<std::size_t> find(const AgentType& type) const;
  /// Coordinatewise expectation, same dimension as the atoms.
  std::vector<double> mean() const;
  /// Lower median of a scalar-demand distribution (smallest atom with CDF >= 1/2).
  double median() const;
  /// Variance of a scalar-demand distribution.
  double variance() const;
};

struct AgentProfile {
  double size = 1.0;
  TypeDistribution distribution;
};

struct ResourceSpace {
  std::vector<double> budgets;
  std::vector<std::string> names;

  std::size_t count() const { return budgets.size(); }
};

enum class UtilityFamily { FillingRatio, Linear };

std::string to_string(UtilityFamily family);
UtilityFamily parse_family(const std::string& name);

/// min(x/theta, 1) for scalar demands, <theta, x> for preference vectors.
double utility(std::span<const double> x, const AgentType& type, UtilityFamily family);

struct Instance {
  std::vector<AgentProfile> agents;
  ResourceSpace resources;
  UtilityFamily family = UtilityFamily::FillingRatio;

  std::size_t agent_count() const { return agents.size(); }
  std::size_t resource_count() const { return resources.count(); }
  std::span<const double> budgets() const { return resources.budgets; }
};

/// One broken invariant. `agent` is set when the violation belongs to one agent.
struct Violation {
  std::optional<std::size_t> agent;
  std::string message;
};

std::string to_string(const Violation& violation);

/// Every violated invariant of `instance`; empty when it is well formed.
std::vector<Violation> validate_instance(const Instance& instance);

class InvalidInstance : public std::invalid_argument {
 public:
  explicit InvalidInstance(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Throws InvalidInstance when validate_instance reports anything.
void require_valid(const Instance& instance);

/// S = sum_i S_i.
double effective_size(const Instance& instance);

/// Instance-wide Lipschitz constant of the utility family in the max norm.
/// Filling ratio: 1 / smallest demand. Linear: largest L1 norm of any type.
double lipschitz_bound(const Instance& instance);

/// Row-major n x K matrix of normalized per-agent allocations.
class Allocation {
 public:
  Allocation() = default;
  Allocation(std::size_t agents, std::size_t resources)
      : agents_(agents), resources_(resources), data_(agents * resources, 0.0) {}

  std::size_t agents() const { return agents_; }
  std::size_t resources() const { return resources_; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * resources_, resources_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * resources_, resources_};
  }
  double& operator()(std::size_t i, std::size_t k) { return data_[i * resources_ + k]; }
  double operator()(std::size_t i, std::size_t k) const { return data_[i * resources_ + k]; }

  std::span<const double> flat() const { return data_; }

  friend bool operator==(const Allocation&, const Allocation&) = default;

 private:
  std::size_t agents_ = 0;
  std::size_t resources_ = 0;
  std::vector<double> data_;
};

/// Per-resource consumption sum_i S_i X_{i,k}.
std::vector<double> consumption(const Allocation& x, const Instance& instance);

/// True when every entry is >= 0 and consumption <= B + kFeasibilityTolerance.
bool is_feasible(const Allocation& x, const Instance& instance);

}  // namespace fairalloc
