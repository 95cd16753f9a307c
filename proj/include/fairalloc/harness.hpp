#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fairalloc/core.hpp"
#include "fairalloc/metrics.hpp"
#include "fairalloc/policies.hpp"

namespace fairalloc {

struct ExperimentConfig {
  /// Budgets already resolved (derived or explicit).
  Instance instance;
  std::vector<PolicyId> policies;
  std::size_t replications = 1000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string output;
  EGOptions solver;
};

/// B_k = sum_i S_i E[theta_{i,k}] (single resource: sum_i S_i E[theta_i]).
std::vector<double> derive_budget(const Instance& instance);

/// Online policies that can run on `family`, canonical order. `offline` runs
/// only when listed explicitly; its metrics are the hindsight baseline.
std::vector<PolicyId> default_policies(UtilityFamily family);

struct ReplicationResult {
  std::size_t replication = 0;
  std::vector<AgentType> realized;
  /// One per configured policy, in the configured order.
  std::vector<MetricRecord> records;
  /// Closeness-bound failures, prefixed with the policy name.
  std::vector<std::string> violations;
};

/// Samples one episode from stream (seed, replication), solves the hindsight
/// program once and scores every configured policy against it.
ReplicationResult run_replication(const ExperimentConfig& config, std::size_t replication);

struct AggregateRow {
  PolicyId policy = PolicyId::Offline;
  std::string metric;
  double mean = 0.0;
  /// 1.96 * sample sd / sqrt(count); 0 when count < 2.
  double ci_halfwidth = 0.0;
  std::size_t count = 0;
};

struct ExperimentResult {
  /// Canonical policy order, then metric order.
  std::vector<AggregateRow> rows;
  /// Replication-major, configured policy order within a replication.
  std::vector<MetricRecord> records;
  /// Records left out of the aggregates because a solver did not converge.
  std::size_t non_converged = 0;
  std::vector<std::string> violations;
};

/// Runs every replication on `config.workers` threads and reduces in
/// replication order, so the output does not depend on the worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::vector<AggregateRow> aggregate(const std::vector<MetricRecord>& records, std::size_t* non_converged = nullptr);

/// Header policy,metric,mean,ci_halfwidth.
void export_csv(const std::vector<AggregateRow>& rows, const std::string& path);
/// Header policy,seed,delta_ef,...,dist_l1. `seed` is the replication index.
void export_records_csv(const std::vector<MetricRecord>& records, const std::string& path);

std::string aggregates_to_csv(const std::vector<AggregateRow>& rows);
std::string records_to_csv(const std::vector<MetricRecord>& records);

/// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace fairalloc
