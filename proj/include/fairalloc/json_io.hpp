#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fairalloc/core.hpp"
#include "fairalloc/harness.hpp"
#include "fairalloc/metrics.hpp"

// JSON formats shared by config files, the CLI and the HTTP service.
//
// Instance:
//   {"family": "filling_ratio" | "linear",
//    "agents": [{"size": 1, "support": [...], "probs": [...]}, ...],
//    "budgets": [...]}
// An agent may give "distribution": {"kind": ..., "params": {...}} instead of
// support/probs, and "repeat": m to stand for m identical agents. "agents" may
// also be a single such object with "count". "budgets" (or "budget") may be
// omitted or "expected_demand" to derive it from the distributions.
//
// Distribution kinds and params:
//   gaussian        {mean, variance | sd, buckets = 20}
//   poisson         {lambda, cap = 20}
//   uniform2        {lo, hi}
//   empirical       {support, probs}
//   bernoulli_prefs {count = 8, seed = 0, weights = product weights}
//
// Experiment configs add "policies", "replications", "seed", "workers",
// "output", "tolerance" and "max_iterations" to the instance fields.

namespace fairalloc {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

AgentType type_from_json(const json& j, UtilityFamily family);
json type_to_json(const AgentType& type);

TypeDistribution distribution_from_json(const json& spec, UtilityFamily family);

/// Parses either instance form. Budgets are derived when not given. Does not
/// validate; call validate_instance or require_valid on the result.
Instance instance_from_json(const json& j);
/// Explicit support/probs form.
json instance_to_json(const Instance& instance);

ExperimentConfig config_from_json(const json& j);
ExperimentConfig load_config(const std::string& path);

json allocation_to_json(const Allocation& x);
json metrics_to_json(const MetricRecord& record);

}  // namespace fairalloc
