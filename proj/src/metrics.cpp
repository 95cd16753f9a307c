#include "fairalloc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fairalloc/kernels.hpp"

namespace fairalloc {

namespace {

void require_shape(const Allocation& x, std::span<const AgentType> types) {
  if (x.agents() != types.size()) throw std::invalid_argument("allocation and type list differ in length");
}

void require_same_shape(const Allocation& a, const Allocation& b) {
  if (a.agents() != b.agents() || a.resources() != b.resources()) {
    throw std::invalid_argument("allocations differ in shape");
  }
}

}  // namespace

double delta_ef(const Allocation& x, std::span<const AgentType> types, UtilityFamily family) {
  require_shape(x, types);
  const std::size_t n = x.agents();
  double worst = 0.0;
  if (family == UtilityFamily::FillingRatio) {
    // min(X_j/theta, 1) is maximized by the largest X_j for every theta.
    const double top = kernels::active().max_value(x.flat().data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      const double best = std::min(top / types[i].demand(), 1.0);
      worst = std::max(worst, best - utility(x.row(i), types[i], family));
    }
    return worst;
  }
  const auto& kt = kernels::active();
  const std::size_t k = x.resources();
  for (std::size_t i = 0; i < n; ++i) {
    const double* theta = types[i].values().data();
    const double own = kt.dot(theta, x.row(i).data(), k);
    for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, kt.dot(theta, x.row(j).data(), k) - own);
  }
  return worst;
}

double delta_pe(const Allocation& x, const Instance& instance) {
  const auto used = consumption(x, instance);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < used.size(); ++k) worst = std::max(worst, instance.budgets()[k] - used[k]);
  return worst / static_cast<double>(instance.agent_count());
}

double delta_prop(const Allocation& x, std::span<const AgentType> types, const Instance& instance) {
  require_shape(x, types);
  const double s = effective_size(instance);
  std::vector<double> share(instance.budgets().begin(), instance.budgets().end());
  for (double& b : share) b /= s;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.agents(); ++i) {
    worst = std::max(worst, utility(share, types[i], instance.family) - utility(x.row(i), types[i], instance.family));
  }
  return worst;
}

double delta_mm(const Allocation& x, std::span<const AgentType> types, UtilityFamily family) {
  require_shape(x, types);
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.agents(); ++i) lowest = std::min(lowest, utility(x.row(i), types[i], family));
  return lowest;
}

double delta_util(const Allocation& x, const Allocation& xopt, std::span<const AgentType> types,
                  UtilityFamily family) {
  require_shape(x, types);
  require_same_shape(x, xopt);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.agents(); ++i) {
    worst = std::max(worst, std::fabs(utility(xopt.row(i), types[i], family) - utility(x.row(i), types[i], family)));
  }
  return worst;
}

double dist_max(const Allocation& x, const Allocation& xopt) {
  require_same_shape(x, xopt);
  return kernels::active().max_abs_diff(x.flat().data(), xopt.flat().data(), x.flat().size());
}

double dist_l1(const Allocation& x, const Allocation& xopt) {
  require_same_shape(x, xopt);
  return kernels::active().sum_abs_diff(x.flat().data(), xopt.flat().data(), x.flat().size());
}

std::array<double, kMetricCount> MetricRecord::values() const {
  return {delta_ef, delta_pe, delta_prop, delta_mm, delta_util, dist_max, dist_l1};
}

MetricRecord evaluate(const Instance& instance, std::span<const AgentType> realized, const Allocation& x,
                      const Allocation& xopt) {
  MetricRecord r;
  r.delta_ef = delta_ef(x, realized, instance.family);
  r.delta_pe = delta_pe(x, instance);
  r.delta_prop = delta_prop(x, realized, instance);
  r.delta_mm = delta_mm(x, realized, instance.family);
  r.delta_util = delta_util(x, xopt, realized, instance.family);
  r.dist_max = dist_max(x, xopt);
  r.dist_l1 = dist_l1(x, xopt);
  return r;
}

std::vector<std::string> check_eclose(const MetricRecord& record, double lipschitz, double total_size,
                                      std::size_t agents, const MetricRecord* hindsight, double slack) {
  const double eps = record.dist_max;
  const double base_ef = hindsight ? std::max(0.0, hindsight->delta_ef) : 0.0;
  const double base_pe = hindsight ? hindsight->delta_pe : 0.0;
  const double base_prop = hindsight ? std::max(0.0, hindsight->delta_prop) : 0.0;

  std::vector<std::string> out;
  auto check = [&](std::string_view name, double value, double bound) {
    if (value > bound + slack) {
      std::ostringstream msg;
      msg.precision(10);
      msg << name << " = " << value << " exceeds bound " << bound << " (eps = " << eps << ")";
      out.push_back(msg.str());
    }
  };
  check("delta_ef", record.delta_ef, base_ef + 2.0 * lipschitz * eps);
  check("delta_pe", record.delta_pe, base_pe + total_size / static_cast<double>(agents) * eps);
  check("delta_prop", record.delta_prop, base_prop + lipschitz * eps);
  return out;
}

}  // namespace fairalloc
