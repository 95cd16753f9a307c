#include "fairalloc/json_io.hpp"

#include <cmath>
#include <fstream>

#include "fairalloc/distributions.hpp"

namespace fairalloc {

namespace {

double number(const json& params, const char* key) {
  if (!params.contains(key)) throw ConfigError(std::string("missing parameter '") + key + "'");
  const json& v = params.at(key);
  if (!v.is_number()) throw ConfigError(std::string("parameter '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& params, const char* key, double fallback) {
  return params.contains(key) ? number(params, key) : fallback;
}

TypeDistribution explicit_distribution(const json& support, const json& probs, UtilityFamily family) {
  if (!support.is_array() || !probs.is_array()) throw ConfigError("support and probs must be arrays");
  TypeDistribution d;
  for (const auto& s : support) d.support.push_back(type_from_json(s, family));
  for (const auto& p : probs) {
    if (!p.is_number()) throw ConfigError("probabilities must be numbers");
    d.probabilities.push_back(p.get<double>());
  }
  return d;
}

std::vector<double> number_array(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be a number or an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(std::string(what) + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void append_agents(const json& spec, UtilityFamily family, std::vector<AgentProfile>& out) {
  if (!spec.is_object()) throw ConfigError("agent entries must be objects");
  AgentProfile a;
  a.size = number_or(spec, "size", 1.0);
  if (spec.contains("distribution")) {
    a.distribution = distribution_from_json(spec.at("distribution"), family);
  } else if (spec.contains("support")) {
    a.distribution = explicit_distribution(spec.at("support"), spec.value("probs", json::array()), family);
  } else {
    throw ConfigError("agent needs 'support'/'probs' or 'distribution'");
  }
  const double repeat = spec.contains("count") ? number(spec, "count") : number_or(spec, "repeat", 1.0);
  if (repeat < 1.0 || repeat != std::floor(repeat)) throw ConfigError("agent count must be a positive integer");
  for (int r = 0; r < static_cast<int>(repeat); ++r) out.push_back(a);
}

}  // namespace

AgentType type_from_json(const json& j, UtilityFamily family) {
  if (family == UtilityFamily::FillingRatio) {
    if (j.is_number()) return AgentType::demand(j.get<double>());
    if (j.is_array() && j.size() == 1 && j[0].is_number()) return AgentType::demand(j[0].get<double>());
    throw ConfigError("filling-ratio types are single numbers");
  }
  return AgentType::preferences(number_array(j, "preference vector"));
}

json type_to_json(const AgentType& type) {
  if (type.is_demand()) return type.demand();
  return json(std::vector<double>(type.values().begin(), type.values().end()));
}

TypeDistribution distribution_from_json(const json& spec, UtilityFamily family) {
  if (!spec.is_object() || !spec.contains("kind")) throw ConfigError("distribution spec needs a 'kind'");
  const std::string kind = spec.at("kind").get<std::string>();
  const json params = spec.value("params", json::object());
  const bool scalar = family == UtilityFamily::FillingRatio;
  auto need_scalar = [&] {
    if (!scalar) throw ConfigError("distribution '" + kind + "' only makes scalar demands");
  };
  try {
    if (kind == "gaussian") {
      need_scalar();
      if (params.contains("sd") == params.contains("variance")) {
        throw ConfigError("gaussian takes exactly one of 'variance' and 'sd'");
      }
      const double variance = params.contains("sd") ? std::pow(number(params, "sd"), 2) : number(params, "variance");
      return discretized_gaussian(number(params, "mean"), variance, static_cast<int>(number_or(params, "buckets", 20)));
    }
    if (kind == "poisson") {
      need_scalar();
      return truncated_poisson(number(params, "lambda"), static_cast<int>(number_or(params, "cap", 20)));
    }
    if (kind == "uniform2") {
      need_scalar();
      return two_point_uniform(number(params, "lo"), number(params, "hi"));
    }
    if (kind == "empirical") {
      return explicit_distribution(params.value("support", json()), params.value("probs", json()), family);
    }
    if (kind == "bernoulli_prefs") {
      if (scalar) throw ConfigError("bernoulli_prefs makes preference vectors; use family 'linear'");
      std::vector<double> weights(kProductWeights.begin(), kProductWeights.end());
      if (params.contains("weights")) weights = number_array(params.at("weights"), "weights");
      std::mt19937_64 gen = SeededRng(static_cast<std::uint64_t>(number_or(params, "seed", 0))).stream(0, 0);
      return bernoulli_preference_profiles(weights, static_cast<int>(number_or(params, "count", 8)), gen);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(kind + ": " + e.what());
  }
  throw ConfigError("unknown distribution kind '" + kind + "'");
}

Instance instance_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ConfigError("instance must be a JSON object");
    Instance inst;
    inst.family = parse_family(j.value("family", std::string("filling_ratio")));
    if (!j.contains("agents")) throw ConfigError("missing 'agents'");
    const json& agents = j.at("agents");
    if (agents.is_array()) {
      for (const auto& a : agents) append_agents(a, inst.family, inst.agents);
    } else {
      append_agents(agents, inst.family, inst.agents);
    }

    const json* budget = nullptr;
    if (j.contains("budgets")) budget = &j.at("budgets");
    else if (j.contains("budget")) budget = &j.at("budget");
    if (budget == nullptr || budget->is_null() || (budget->is_string() && budget->get<std::string>() == "expected_demand")) {
      if (!inst.agents.empty()) inst.resources.budgets = derive_budget(inst);
    } else if (budget->is_string()) {
      throw ConfigError("budget rule must be 'expected_demand' or explicit numbers");
    } else {
      inst.resources.budgets = number_array(*budget, "budgets");
    }

    if (j.contains("resource_names")) {
      inst.resources.names = j.at("resource_names").get<std::vector<std::string>>();
    }
    if (inst.resources.names.size() != inst.resources.budgets.size()) {
      inst.resources.names.clear();
      for (std::size_t k = 0; k < inst.resources.budgets.size(); ++k) inst.resources.names.push_back("r" + std::to_string(k));
    }
    return inst;
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

json instance_to_json(const Instance& instance) {
  json agents = json::array();
  for (const auto& a : instance.agents) {
    json support = json::array();
    for (const auto& t : a.distribution.support) support.push_back(type_to_json(t));
    agents.push_back({{"size", a.size}, {"support", support}, {"probs", a.distribution.probabilities}});
  }
  return {
      {"family", to_string(instance.family)},
      {"agents", agents},
      {"budgets", instance.resources.budgets},
      {"resource_names", instance.resources.names},
  };
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.instance = instance_from_json(j);
  try {
    if (j.contains("policies")) {
      for (const auto& p : j.at("policies")) c.policies.push_back(parse_policy(p.get<std::string>()));
    } else {
      c.policies = default_policies(c.instance.family);
    }
    for (PolicyId p : c.policies) {
      if (!supports_family(p, c.instance.family)) {
        throw ConfigError(std::string(policy_name(p)) + " cannot run on " + to_string(c.instance.family));
      }
    }
    const double reps = number_or(j, "replications", 1000);
    if (reps < 1.0) throw ConfigError("replications must be at least 1");
    c.replications = static_cast<std::size_t>(reps);
    c.seed = j.value("seed", std::uint64_t{0});
    c.workers = j.value("workers", std::size_t{1});
    c.output = j.value("output", std::string());
    c.solver.tolerance = number_or(j, "tolerance", c.solver.tolerance);
    c.solver.max_iterations = j.value("max_iterations", c.solver.max_iterations);
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j);
}

json allocation_to_json(const Allocation& x) {
  json rows = json::array();
  for (std::size_t i = 0; i < x.agents(); ++i) rows.push_back(std::vector<double>(x.row(i).begin(), x.row(i).end()));
  return rows;
}

json metrics_to_json(const MetricRecord& record) {
  json out = json::object();
  const auto values = record.values();
  for (std::size_t m = 0; m < kMetricCount; ++m) out[std::string(kMetricNames[m])] = values[m];
  out["converged"] = record.converged;
  return out;
}

}  // namespace fairalloc
