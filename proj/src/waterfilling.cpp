#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairalloc/solvers.hpp"

namespace fairalloc {

void TypeHistogram::add(const AgentType& type, double weight) {
  if (!(weight >= 0.0)) throw std::invalid_argument("histogram weights must be non-negative");
  if (auto idx = find(type)) {
    entries_[*idx].weight += weight;
    return;
  }
  entries_.push_back({type, weight});
}

std::optional<std::size_t> TypeHistogram::find(const AgentType& type) const {
  for (std::size_t t = 0; t < entries_.size(); ++t) {
    if (entries_[t].type == type) return t;
  }
  return std::nullopt;
}

double TypeHistogram::total_weight() const {
  double w = 0.0;
  for (const auto& e : entries_) w += e.weight;
  return w;
}

std::span<const double> EGSolution::row_for(const TypeHistogram& histogram, const AgentType& type) const {
  const auto idx = histogram.find(type);
  if (!idx) throw SolverError("type " + to_string(type) + " is not in the solved histogram");
  return allocation.row(*idx);
}

double waterfilling_threshold(const TypeHistogram& histogram, double budget) {
  if (!(budget >= 0.0)) throw std::invalid_argument("waterfilling budget must be non-negative");
  if (histogram.empty()) throw std::invalid_argument("waterfilling needs a non-empty histogram");

  struct Breakpoint {
    double demand;
    double weight;
  };
  std::vector<Breakpoint> points;
  points.reserve(histogram.size());
  for (const auto& e : histogram.entries()) {
    if (!e.type.is_demand() || !(e.type.demand() > 0.0)) {
      throw std::invalid_argument("waterfilling needs positive scalar demands");
    }
    if (e.weight > 0.0) points.push_back({e.type.demand(), e.weight});
  }
  if (points.empty()) throw std::invalid_argument("waterfilling histogram has zero total weight");
  std::sort(points.begin(), points.end(),
            [](const Breakpoint& a, const Breakpoint& b) { return a.demand < b.demand; });

  double total_demand = 0.0;
  for (const auto& p : points) total_demand += p.weight * p.demand;
  if (budget >= total_demand) return points.back().demand;

  // suffix[j] = weight of breakpoints j..end, all still below the level at demand_j.
  std::vector<double> suffix(points.size() + 1, 0.0);
  for (std::size_t j = points.size(); j-- > 0;) suffix[j] = suffix[j + 1] + points[j].weight;

  double filled = 0.0;  // consumption of the demands already capped
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double at_breakpoint = filled + suffix[j] * points[j].demand;
    if (at_breakpoint >= budget) return (budget - filled) / suffix[j];
    filled += points[j].weight * points[j].demand;
  }
  return points.back().demand;
}

EGSolution solve_waterfilling(const TypeHistogram& histogram, double budget) {
  const double level = waterfilling_threshold(histogram, budget);
  EGSolution sol;
  sol.allocation = Allocation(histogram.size(), 1);
  for (std::size_t t = 0; t < histogram.size(); ++t) {
    sol.allocation(t, 0) = std::min(level, histogram.entries()[t].type.demand());
  }
  sol.threshold = level;
  return sol;
}

}  // namespace fairalloc
