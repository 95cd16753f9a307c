#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fairalloc/core.hpp"

namespace fairalloc {

struct HistogramEntry {
  AgentType type;
  double weight = 0.0;

  friend bool operator==(const HistogramEntry&, const HistogramEntry&) = default;
};

/// Weighted set of distinct agent types. Adding an existing type accumulates
/// its weight, so equal types are always merged.
class TypeHistogram {
 public:
  void add(const AgentType& type, double weight);

  std::span<const HistogramEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::optional<std::size_t> find(const AgentType& type) const;
  double total_weight() const;

  friend bool operator==(const TypeHistogram&, const TypeHistogram&) = default;

 private:
  std::vector<HistogramEntry> entries_;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solution of the type-aggregated Eisenberg-Gale program.
struct EGSolution {
  /// Row t is the normalized allocation X_t of histogram entry t.
  Allocation allocation;
  /// Water level w_f, filling-ratio solutions only.
  std::optional<double> threshold;
  double kkt_residual = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
  /// Resources with positive budget that no positive-weight type values.
  /// They receive price zero and stay unallocated.
  std::vector<std::size_t> unpriced_resources;

  std::span<const double> row_for(const TypeHistogram& histogram, const AgentType& type) const;
};

/// Common level w_f with sum_t w_t min(theta_t, w_f) = min(budget, sum_t w_t theta_t),
/// found by sorting demands and scanning the piecewise-linear consumption curve.
/// Returns the largest demand when the budget covers everything.
double waterfilling_threshold(const TypeHistogram& histogram, double budget);

/// X_t = min(w_f, theta_t).
EGSolution solve_waterfilling(const TypeHistogram& histogram, double budget);

struct EGOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 200000;
};

/// Linear-utility Eisenberg-Gale program solved as a Fisher market with
/// proportional-response dynamics. Each type spends its weight; prices are
/// per-resource bid totals; allocations are bid shares of the budget. The
/// returned kkt_residual is the largest relative bang-per-buck violation:
///   max over (t,k) of (rho_tk - 1)+  and  max over t of sum_k (b_tk/w_t)|rho_tk - 1|,
/// with rho_tk = theta_tk (B_k/p_k) w_t / u_t. A non-converged run still returns
/// the last iterate with converged == false.
EGSolution solve_eg_linear(const TypeHistogram& histogram, std::span<const double> budget,
                           const EGOptions& options = {});

/// Dispatch on the utility family.
EGSolution solve_eg(const TypeHistogram& histogram, std::span<const double> budget,
                    UtilityFamily family, const EGOptions& options = {});

/// sum_t w_t log u(X_t, theta_t), -inf when some positive-weight utility is 0.
double eg_objective(const TypeHistogram& histogram, const Allocation& per_type, UtilityFamily family);

/// Histogram with weight S_i for each agent's realized type.
TypeHistogram realized_histogram(const Instance& instance, std::span<const AgentType> realized);

struct OfflineSolution {
  Allocation allocation;
  TypeHistogram histogram;
  EGSolution program;
};

/// Hindsight Nash-social-welfare optimum for the realized types, expanded to
/// per-agent rows.
OfflineSolution offline_solve(const Instance& instance, std::span<const AgentType> realized,
                              const EGOptions& options = {});

Allocation offline_optimal(const Instance& instance, std::span<const AgentType> realized,
                           const EGOptions& options = {});

}  // namespace fairalloc
