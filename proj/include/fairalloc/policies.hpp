#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairalloc/core.hpp"
#include "fairalloc/solvers.hpp"

namespace fairalloc {

enum class PolicyId {
  HopeOnline,
  HopeFull,
  EtOnline,
  EtFull,
  MaxMin,
  Greedy,
  AdaptiveThreshold,
  Proportional,
  Offline,
};

/// Every identifier in canonical (output) order.
std::span<const PolicyId> all_policies();
std::string_view policy_name(PolicyId id);
PolicyId parse_policy(std::string_view name);
/// Whether the policy can run on instances of this family.
bool supports_family(PolicyId id, UtilityFamily family);
/// Online policies usable for the family, canonical order, `offline` excluded.
std::vector<PolicyId> online_policies(UtilityFamily family);

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mutable knowledge shared by the online policies during one episode. It is
/// policy-agnostic: any online policy can step from it.
struct PolicyState {
  std::shared_ptr<const Instance> instance;
  /// Next agent to serve, 0-based.
  std::size_t index = 0;
  /// B^i, clamped at zero.
  std::vector<double> remaining;
  std::vector<AgentType> observed;
  /// Smallest realized utility so far; 1 before the first agent.
  double beta_min = 1.0;

  explicit PolicyState(std::shared_ptr<const Instance> inst);
  bool complete() const { return index >= instance->agent_count(); }
};

struct StepOutput {
  std::vector<double> allocation;
  /// Water level used for this agent (filling-ratio policies that have one).
  std::optional<double> threshold;
  /// False when an iterative solve stopped before reaching its tolerance.
  bool converged = true;
};

/// Allocation the policy would make for the next agent, without mutating state.
StepOutput propose(PolicyId policy, const PolicyState& state, const AgentType& observed,
                   const EGOptions& options = {});

/// Commits `output` for the next agent: B^{i+1} = B^i - S_i X_i.
void commit(PolicyState& state, const AgentType& observed, std::span<const double> allocation);

/// propose + commit.
StepOutput step(PolicyId policy, PolicyState& state, const AgentType& observed,
                const EGOptions& options = {});

struct EpisodeResult {
  PolicyId policy = PolicyId::Offline;
  Allocation allocation;
  std::vector<AgentType> realized;
  /// Per-step water levels; empty optional for policies without one.
  std::vector<std::optional<double>> thresholds;
  bool converged = true;
};

/// Drives agents 0..n-1 through `policy`. `offline` solves the hindsight program.
EpisodeResult run_policy(PolicyId policy, std::shared_ptr<const Instance> instance,
                         std::span<const AgentType> realized, const EGOptions& options = {});

// Program builders, exposed so tests can compare the programs themselves.

/// Hope-Online histogram: S_i at the observed type plus sum_{j>i} S_j Pr(theta_j = .).
TypeHistogram hope_online_histogram(const PolicyState& state, const AgentType& observed);
/// Hope-Full histogram: realized types of agents <= i plus expected future.
TypeHistogram hope_full_histogram(const PolicyState& state, const AgentType& observed);
/// Expected-type histogram: observed type for agent i, E[theta_j] for j > i, and
/// (full variant) realized types for j < i.
TypeHistogram expected_type_histogram(const PolicyState& state, const AgentType& observed, bool full);

}  // namespace fairalloc
