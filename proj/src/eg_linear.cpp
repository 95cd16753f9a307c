#include <algorithm>
#include <cmath>
#include <limits>

#include "fairalloc/kernels.hpp"
#include "fairalloc/solvers.hpp"

namespace fairalloc {

namespace {

// Dense market restricted to the types and resources that take part:
// positive-weight types that value some resource with positive budget, and
// resources with positive budget valued by some such type.
struct Market {
  std::vector<std::size_t> types;      // histogram rows
  std::vector<std::size_t> resources;  // budget columns
  std::vector<double> prefs;           // types x resources
  std::vector<double> money;
  std::vector<double> supply;
};

Market build_market(const TypeHistogram& histogram, std::span<const double> budget,
                     std::vector<std::size_t>& unpriced) {
  const std::size_t k_all = budget.size();
  std::vector<bool> valued(k_all, false);
  std::vector<std::size_t> candidate_types;
  for (std::size_t t = 0; t < histogram.size(); ++t) {
    const auto& e = histogram.entries()[t];
    if (e.type.is_demand() || e.type.dimension() != k_all) {
      throw std::invalid_argument("linear solver needs preference vectors of length K");
    }
    if (!(e.weight > 0.0)) continue;
    bool reachable = false;
    for (std::size_t k = 0; k < k_all; ++k) {
      if (e.type.values()[k] > 0.0 && budget[k] > 0.0) reachable = true;
    }
    if (!reachable) continue;
    candidate_types.push_back(t);
    for (std::size_t k = 0; k < k_all; ++k) {
      if (e.type.values()[k] > 0.0) valued[k] = true;
    }
  }

  Market m;
  m.types = std::move(candidate_types);
  for (std::size_t k = 0; k < k_all; ++k) {
    if (!(budget[k] > 0.0)) continue;
    if (valued[k]) {
      m.resources.push_back(k);
      m.supply.push_back(budget[k]);
    } else {
      unpriced.push_back(k);
    }
  }
  const std::size_t cols = m.resources.size();
  m.prefs.assign(m.types.size() * cols, 0.0);
  for (std::size_t a = 0; a < m.types.size(); ++a) {
    const auto& e = histogram.entries()[m.types[a]];
    m.money.push_back(e.weight);
    for (std::size_t g = 0; g < cols; ++g) m.prefs[a * cols + g] = e.type.values()[m.resources[g]];
  }
  return m;
}

}  // namespace

EGSolution solve_eg_linear(const TypeHistogram& histogram, std::span<const double> budget,
                           const EGOptions& options) {
  if (histogram.empty()) throw SolverError("degenerate histogram: no entries");
  if (!(histogram.total_weight() > 0.0)) throw SolverError("degenerate histogram: zero total weight");
  for (double b : budget) {
    if (!(b >= 0.0)) throw std::invalid_argument("budgets must be non-negative");
  }

  EGSolution sol;
  sol.allocation = Allocation(histogram.size(), budget.size());
  Market m = build_market(histogram, budget, sol.unpriced_resources);
  const std::size_t rows = m.types.size();
  const std::size_t cols = m.resources.size();
  if (rows == 0 || cols == 0) return sol;

  const auto& kern = kernels::active();

  std::vector<double> bids(rows * cols, 0.0);
  for (std::size_t a = 0; a < rows; ++a) {
    std::size_t liked = 0;
    for (std::size_t g = 0; g < cols; ++g) liked += m.prefs[a * cols + g] > 0.0 ? 1 : 0;
    for (std::size_t g = 0; g < cols; ++g) {
      if (m.prefs[a * cols + g] > 0.0) bids[a * cols + g] = m.money[a] / static_cast<double>(liked);
    }
  }

  std::vector<double> prices(cols);
  std::vector<double> units_per_money(cols);
  std::vector<double> utilities(rows);

  auto refresh = [&] {
    kern.column_sums(bids.data(), rows, cols, prices.data());
    for (std::size_t g = 0; g < cols; ++g) {
      units_per_money[g] = prices[g] > 0.0 ? m.supply[g] / prices[g] : 0.0;
    }
    for (std::size_t a = 0; a < rows; ++a) {
      utilities[a] = kern.dot3(m.prefs.data() + a * cols, bids.data() + a * cols, units_per_money.data(), cols);
    }
  };

  auto residual = [&] {
    double worst = 0.0;
    for (std::size_t a = 0; a < rows; ++a) {
      const double per_util = m.money[a] / utilities[a];
      double slack = 0.0;
      for (std::size_t g = 0; g < cols; ++g) {
        const double rho = m.prefs[a * cols + g] * units_per_money[g] * per_util;
        worst = std::max(worst, rho - 1.0);
        slack += bids[a * cols + g] / m.money[a] * std::fabs(rho - 1.0);
      }
      worst = std::max(worst, slack);
    }
    return worst;
  };

  std::size_t iter = 0;
  double res = std::numeric_limits<double>::infinity();
  refresh();
  for (;;) {
    res = residual();
    if (res <= options.tolerance || iter >= options.max_iterations) break;
    for (std::size_t a = 0; a < rows; ++a) {
      kern.scale3(m.prefs.data() + a * cols, bids.data() + a * cols, units_per_money.data(),
                  m.money[a] / utilities[a], cols);
    }
    ++iter;
    refresh();
  }

  sol.iterations = iter;
  sol.kkt_residual = res;
  sol.converged = res <= options.tolerance;
  for (std::size_t a = 0; a < rows; ++a) {
    const std::size_t t = m.types[a];
    for (std::size_t g = 0; g < cols; ++g) {
      sol.allocation(t, m.resources[g]) = bids[a * cols + g] * units_per_money[g] / m.money[a];
    }
  }
  return sol;
}

EGSolution solve_eg(const TypeHistogram& histogram, std::span<const double> budget, UtilityFamily family,
                    const EGOptions& options) {
  if (family == UtilityFamily::FillingRatio) {
    if (budget.size() != 1) throw std::invalid_argument("filling-ratio programs have one resource");
    return solve_waterfilling(histogram, budget[0]);
  }
  return solve_eg_linear(histogram, budget, options);
}

double eg_objective(const TypeHistogram& histogram, const Allocation& per_type, UtilityFamily family) {
  double total = 0.0;
  for (std::size_t t = 0; t < histogram.size(); ++t) {
    const auto& e = histogram.entries()[t];
    if (!(e.weight > 0.0)) continue;
    const double u = utility(per_type.row(t), e.type, family);
    if (!(u > 0.0)) return -std::numeric_limits<double>::infinity();
    total += e.weight * std::log(u);
  }
  return total;
}

TypeHistogram realized_histogram(const Instance& instance, std::span<const AgentType> realized) {
  if (realized.size() != instance.agent_count()) {
    throw std::invalid_argument("realized types must have one entry per agent");
  }
  TypeHistogram h;
  for (std::size_t i = 0; i < realized.size(); ++i) h.add(realized[i], instance.agents[i].size);
  return h;
}

OfflineSolution offline_solve(const Instance& instance, std::span<const AgentType> realized,
                              const EGOptions& options) {
  OfflineSolution out;
  out.histogram = realized_histogram(instance, realized);
  out.program = solve_eg(out.histogram, instance.budgets(), instance.family, options);
  out.allocation = Allocation(instance.agent_count(), instance.resource_count());
  for (std::size_t i = 0; i < realized.size(); ++i) {
    const auto row = out.program.row_for(out.histogram, realized[i]);
    const double cap_scale = 1.0 / instance.agents[i].size;
    for (std::size_t k = 0; k < row.size(); ++k) {
      // B_k / S_i never binds for an exact solution; it only trims round-off.
      out.allocation(i, k) = std::clamp(row[k], 0.0, instance.budgets()[k] * cap_scale);
    }
  }
  return out;
}

Allocation offline_optimal(const Instance& instance, std::span<const AgentType> realized,
                           const EGOptions& options) {
  return offline_solve(instance, realized, options).allocation;
}

}  // namespace fairalloc
