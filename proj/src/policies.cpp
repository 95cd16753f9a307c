#include "fairalloc/policies.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace fairalloc {

namespace {

constexpr std::array kAllPolicies{
    PolicyId::HopeOnline, PolicyId::HopeFull,          PolicyId::EtOnline,     PolicyId::EtFull, PolicyId::MaxMin,
    PolicyId::Greedy,     PolicyId::AdaptiveThreshold, PolicyId::Proportional, PolicyId::Offline,
};

struct Expectations {
  // suffix[i] = sum_{j >= i} S_j Pr(theta_j = .), suffix[n] empty.
  std::vector<TypeHistogram> suffix;
  std::vector<AgentType> expected_types;
  // Scalar summaries, filled for filling-ratio instances only.
  std::vector<double> means;
  std::vector<double> medians;
  std::vector<double> std_devs;
  std::vector<double> suffix_mean_sums;
};

std::shared_ptr<const Expectations> build_expectations(const Instance& inst) {
  auto e = std::make_shared<Expectations>();
  const std::size_t n = inst.agent_count();
  e->suffix.resize(n + 1);
  for (std::size_t j = n; j-- > 0;) {
    e->suffix[j] = e->suffix[j + 1];
    const auto& a = inst.agents[j];
    for (std::size_t s = 0; s < a.distribution.size(); ++s) {
      const double p = a.distribution.probabilities[s];
      if (p > 0.0) e->suffix[j].add(a.distribution.support[s], a.size * p);
    }
  }
  for (const auto& a : inst.agents) {
    auto mu = a.distribution.mean();
    if (inst.family == UtilityFamily::FillingRatio) {
      e->expected_types.push_back(AgentType::demand(mu.at(0)));
      e->means.push_back(mu.at(0));
      e->medians.push_back(a.distribution.median());
      e->std_devs.push_back(std::sqrt(a.distribution.variance()));
    } else {
      e->expected_types.push_back(AgentType::preferences(std::move(mu)));
    }
  }
  if (inst.family == UtilityFamily::FillingRatio) {
    e->suffix_mean_sums.assign(n + 1, 0.0);
    for (std::size_t j = n; j-- > 0;) e->suffix_mean_sums[j] = e->suffix_mean_sums[j + 1] + e->means[j];
  }
  return e;
}

// One cache per instance object; episodes reuse it.
std::shared_ptr<const Expectations> expectations_for(const std::shared_ptr<const Instance>& inst) {
  static thread_local std::weak_ptr<const Instance> last_instance;
  static thread_local std::shared_ptr<const Expectations> last;
  if (last && last_instance.lock() == inst) return last;
  last = build_expectations(*inst);
  last_instance = inst;
  return last;
}

double agent_size(const PolicyState& s) { return s.instance->agents[s.index].size; }

// X clipped componentwise into [0, B^i / S_i].
std::vector<double> clip_to_remaining(std::span<const double> x, const PolicyState& s) {
  const double size = agent_size(s);
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::clamp(x[k], 0.0, s.remaining[k] / size);
  return out;
}

StepOutput solve_and_pick(const TypeHistogram& h, std::span<const double> budget, const PolicyState& s,
                          const AgentType& observed, const EGOptions& options) {
  const EGSolution sol = solve_eg(h, budget, s.instance->family, options);
  StepOutput out;
  out.allocation = clip_to_remaining(sol.row_for(h, observed), s);
  out.threshold = sol.threshold;
  out.converged = sol.converged;
  return out;
}

void require_filling_ratio(const PolicyState& s, PolicyId id) {
  if (s.instance->family != UtilityFamily::FillingRatio) {
    throw PolicyError(std::string(policy_name(id)) + " needs a single-resource filling-ratio instance");
  }
}

StepOutput maxmin_step(const PolicyState& s, const AgentType& observed) {
  require_filling_ratio(s, PolicyId::MaxMin);
  for (const auto& a : s.instance->agents) {
    if (a.size != 1.0) throw PolicyError("maxmin is defined for unit agent sizes only");
  }
  const auto e = expectations_for(s.instance);
  const std::size_t n = s.instance->agent_count();
  const std::size_t i = s.index;
  const double theta = observed.demand();
  const double budget = s.remaining[0];

  StepOutput out;
  if (i + 1 == n) {
    out.allocation = {std::min(s.beta_min * theta, budget)};
    return out;
  }
  const double mean_tail = e->suffix_mean_sums[i];
  const double allotment = mean_tail > 0.0 ? budget * (e->means[i] + e->means[i + 1]) / mean_tail : 0.0;
  double spread = 0.0;
  if (i + 2 < n) {
    const double m1 = e->medians[i + 1];
    const double m2 = e->medians[i + 2];
    spread = (m1 - m2) / ((m1 + m2) / 2.0);
  }
  const double denom = theta + e->medians[i + 1] + spread * e->std_devs[i + 1];
  const double level = denom > 0.0 ? allotment * theta / denom : allotment;
  out.threshold = level;
  out.allocation = {std::clamp(std::min(level, s.beta_min * theta), 0.0, budget)};
  return out;
}

}  // namespace

std::span<const PolicyId> all_policies() { return kAllPolicies; }

std::string_view policy_name(PolicyId id) {
  switch (id) {
    case PolicyId::HopeOnline: return "hope_online";
    case PolicyId::HopeFull: return "hope_full";
    case PolicyId::EtOnline: return "et_online";
    case PolicyId::EtFull: return "et_full";
    case PolicyId::MaxMin: return "maxmin";
    case PolicyId::Greedy: return "greedy";
    case PolicyId::AdaptiveThreshold: return "adaptive_threshold";
    case PolicyId::Proportional: return "proportional";
    case PolicyId::Offline: return "offline";
  }
  return "unknown";
}

PolicyId parse_policy(std::string_view name) {
  for (PolicyId id : kAllPolicies) {
    if (policy_name(id) == name) return id;
  }
  throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

bool supports_family(PolicyId id, UtilityFamily family) {
  switch (id) {
    case PolicyId::MaxMin:
    case PolicyId::Greedy:
    case PolicyId::AdaptiveThreshold: return family == UtilityFamily::FillingRatio;
    default: return true;
  }
}

std::vector<PolicyId> online_policies(UtilityFamily family) {
  std::vector<PolicyId> out;
  for (PolicyId id : kAllPolicies) {
    if (id != PolicyId::Offline && supports_family(id, family)) out.push_back(id);
  }
  return out;
}

PolicyState::PolicyState(std::shared_ptr<const Instance> inst)
    : instance(std::move(inst)), remaining(instance->resources.budgets) {}

TypeHistogram hope_online_histogram(const PolicyState& state, const AgentType& observed) {
  const auto e = expectations_for(state.instance);
  TypeHistogram h;
  h.add(observed, agent_size(state));
  for (const auto& entry : e->suffix[state.index + 1].entries()) h.add(entry.type, entry.weight);
  return h;
}

TypeHistogram hope_full_histogram(const PolicyState& state, const AgentType& observed) {
  const auto e = expectations_for(state.instance);
  TypeHistogram h;
  for (std::size_t j = 0; j < state.index; ++j) h.add(state.observed[j], state.instance->agents[j].size);
  h.add(observed, agent_size(state));
  for (const auto& entry : e->suffix[state.index + 1].entries()) h.add(entry.type, entry.weight);
  return h;
}

TypeHistogram expected_type_histogram(const PolicyState& state, const AgentType& observed, bool full) {
  const auto e = expectations_for(state.instance);
  const auto& agents = state.instance->agents;
  TypeHistogram h;
  if (full) {
    for (std::size_t j = 0; j < state.index; ++j) h.add(state.observed[j], agents[j].size);
  }
  h.add(observed, agents[state.index].size);
  for (std::size_t j = state.index + 1; j < agents.size(); ++j) h.add(e->expected_types[j], agents[j].size);
  return h;
}

StepOutput propose(PolicyId policy, const PolicyState& state, const AgentType& observed, const EGOptions& options) {
  if (state.complete()) throw PolicyError("episode is complete");
  const Instance& inst = *state.instance;
  const std::span<const double> remaining = state.remaining;

  switch (policy) {
    case PolicyId::HopeOnline:
      return solve_and_pick(hope_online_histogram(state, observed), remaining, state, observed, options);
    case PolicyId::HopeFull:
      return solve_and_pick(hope_full_histogram(state, observed), inst.budgets(), state, observed, options);
    case PolicyId::EtOnline:
      return solve_and_pick(expected_type_histogram(state, observed, false), remaining, state, observed, options);
    case PolicyId::EtFull:
      return solve_and_pick(expected_type_histogram(state, observed, true), inst.budgets(), state, observed, options);
    case PolicyId::MaxMin: return maxmin_step(state, observed);
    case PolicyId::Greedy: {
      require_filling_ratio(state, policy);
      StepOutput out;
      out.allocation = {std::min(observed.demand(), state.remaining[0] / agent_size(state))};
      return out;
    }
    case PolicyId::AdaptiveThreshold: {
      require_filling_ratio(state, policy);
      const double agents_left = static_cast<double>(inst.agent_count() - state.index);
      const double share = state.remaining[0] / agents_left / agent_size(state);
      StepOutput out;
      out.allocation = {std::min(share, observed.demand())};
      out.threshold = share;
      return out;
    }
    case PolicyId::Proportional: {
      // B/S is feasible by construction; it is not clipped so every agent
      // receives the bit-identical bundle.
      const double s = effective_size(inst);
      StepOutput out;
      out.allocation.resize(inst.resource_count());
      for (std::size_t k = 0; k < out.allocation.size(); ++k) out.allocation[k] = inst.budgets()[k] / s;
      return out;
    }
    case PolicyId::Offline: throw PolicyError("offline is not an online policy");
  }
  throw PolicyError("unknown policy");
}

void commit(PolicyState& state, const AgentType& observed, std::span<const double> allocation) {
  if (state.complete()) throw PolicyError("episode is complete");
  const Instance& inst = *state.instance;
  const double size = inst.agents[state.index].size;
  for (std::size_t k = 0; k < state.remaining.size(); ++k) {
    state.remaining[k] = std::max(0.0, state.remaining[k] - size * allocation[k]);
  }
  if (inst.family == UtilityFamily::FillingRatio) {
    state.beta_min = std::min(state.beta_min, utility(allocation, observed, inst.family));
  }
  state.observed.push_back(observed);
  ++state.index;
}

StepOutput step(PolicyId policy, PolicyState& state, const AgentType& observed, const EGOptions& options) {
  StepOutput out = propose(policy, state, observed, options);
  commit(state, observed, out.allocation);
  return out;
}

EpisodeResult run_policy(PolicyId policy, std::shared_ptr<const Instance> instance,
                         std::span<const AgentType> realized, const EGOptions& options) {
  const std::size_t n = instance->agent_count();
  if (realized.size() != n) throw std::invalid_argument("realized types must have one entry per agent");

  EpisodeResult res;
  res.policy = policy;
  res.realized.assign(realized.begin(), realized.end());

  if (policy == PolicyId::Offline) {
    OfflineSolution off = offline_solve(*instance, realized, options);
    res.allocation = std::move(off.allocation);
    res.thresholds.assign(n, off.program.threshold);
    res.converged = off.program.converged;
    return res;
  }
  if (!supports_family(policy, instance->family)) {
    throw PolicyError(std::string(policy_name(policy)) + " does not support " + to_string(instance->family));
  }

  res.allocation = Allocation(n, instance->resource_count());
  PolicyState state(instance);
  for (std::size_t i = 0; i < n; ++i) {
    StepOutput out;
    try {
      out = step(policy, state, realized[i], options);
    } catch (const std::exception& ex) {
      throw PolicyError("agent " + std::to_string(i) + ": " + ex.what());
    }
    std::copy(out.allocation.begin(), out.allocation.end(), res.allocation.row(i).begin());
    res.thresholds.push_back(out.threshold);
    res.converged = res.converged && out.converged;
  }
  if (!is_feasible(res.allocation, *instance)) {
    throw PolicyError(std::string(policy_name(policy)) + " produced an infeasible allocation");
  }
  return res;
}

}  // namespace fairalloc
