#pragma once

#include <array>
#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairalloc/core.hpp"
#include "fairalloc/policies.hpp"

namespace fairalloc {

/// max_{i,j} u(X_j, theta_i) - u(X_i, theta_i). The i == j pairs keep it >= 0.
double delta_ef(const Allocation& x, std::span<const AgentType> types, UtilityFamily family);
/// max_k (B_k - sum_i S_i X_{i,k}) / n. Not clamped at zero.
double delta_pe(const Allocation& x, const Instance& instance);
/// max_i u(B/S, theta_i) - u(X_i, theta_i).
double delta_prop(const Allocation& x, std::span<const AgentType> types, const Instance& instance);
/// min_i u(X_i, theta_i).
double delta_mm(const Allocation& x, std::span<const AgentType> types, UtilityFamily family);
/// max_i |u(Xopt_i, theta_i) - u(X_i, theta_i)|.
double delta_util(const Allocation& x, const Allocation& xopt, std::span<const AgentType> types,
                  UtilityFamily family);
double dist_max(const Allocation& x, const Allocation& xopt);
double dist_l1(const Allocation& x, const Allocation& xopt);

/// CSV identifiers, in output order.
inline constexpr std::string_view kMetricNames[] = {
    "delta_ef", "delta_pe", "delta_prop", "delta_mm", "delta_util", "dist_max", "dist_l1",
};
inline constexpr std::size_t kMetricCount = std::size(kMetricNames);

struct MetricRecord {
  PolicyId policy = PolicyId::Offline;
  std::uint64_t seed = 0;
  double delta_ef = 0.0;
  double delta_pe = 0.0;
  double delta_prop = 0.0;
  double delta_mm = 0.0;
  double delta_util = 0.0;
  double dist_max = 0.0;
  double dist_l1 = 0.0;
  /// False when a solver inside the policy (or the hindsight solve) did not converge.
  bool converged = true;

  /// Metric values in kMetricNames order.
  std::array<double, kMetricCount> values() const;
};

MetricRecord evaluate(const Instance& instance, std::span<const AgentType> realized, const Allocation& x,
                      const Allocation& xopt);

/// Pathwise closeness bounds for eps = dist_max:
///   delta_ef   <= ef(X*)   + 2 L eps
///   delta_pe   <= pe(X*)   + (S/n) eps
///   delta_prop <= prop(X*) + L eps
/// where X* is the hindsight optimum and ef/pe/prop(X*) its own distances
/// (`hindsight`). With no hindsight record they are taken as 0, i.e. X* is
/// assumed exactly fair and waste-free. Returns a description of each bound
/// exceeded by more than `slack`.
std::vector<std::string> check_eclose(const MetricRecord& record, double lipschitz, double total_size,
                                      std::size_t agents, const MetricRecord* hindsight = nullptr,
                                      double slack = 1e-6);

}  // namespace fairalloc
