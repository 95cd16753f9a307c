#include "fairalloc/presets.hpp"

#include "fairalloc/distributions.hpp"

namespace fairalloc {

namespace {

// Seed for the eight sampled preference profiles of the nine-product setup.
constexpr int kProfileSeed = 2021;

json iid_filling_ratio(int n, json distribution) {
  return {
      {"family", "filling_ratio"},
      {"agents", {{"count", n}, {"size", 1.0}, {"distribution", std::move(distribution)}}},
      {"budget", "expected_demand"},
      {"replications", 1000},
      {"seed", 1},
  };
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"gaussian100", "poisson100", "simple100", "fbst6", "multiresource6"};
}

json preset_config(std::string_view name) {
  if (name == "gaussian100") {
    // Standard deviation 3, i.e. variance 9.
    return iid_filling_ratio(100, {{"kind", "gaussian"}, {"params", {{"mean", 15.0}, {"sd", 3.0}, {"buckets", 20}}}});
  }
  if (name == "poisson100") {
    return iid_filling_ratio(100, {{"kind", "poisson"}, {"params", {{"lambda", 10.0}, {"cap", 20}}}});
  }
  if (name == "simple100") {
    return iid_filling_ratio(100, {{"kind", "uniform2"}, {"params", {{"lo", 1.0}, {"hi", 2.0}}}});
  }
  if (name == "fbst6") {
    json agents = json::array();
    for (double m : kFbstMeans) {
      agents.push_back({{"size", 1.0},
                        {"distribution", {{"kind", "gaussian"}, {"params", {{"mean", m}, {"variance", m / 5.0}, {"buckets", 20}}}}}});
    }
    json c = {{"family", "filling_ratio"}, {"agents", agents}, {"budget", "expected_demand"}, {"replications", 1000}, {"seed", 1}};
    c["resource_names"] = {"food"};
    return c;
  }
  if (name == "multiresource6") {
    json prefs = {{"kind", "bernoulli_prefs"},
                  {"params", {{"count", 8}, {"seed", kProfileSeed}, {"weights", kProductWeights}}}};
    json agents = json::array();
    for (double s : kFbstMeans) agents.push_back({{"size", s}, {"distribution", prefs}});
    return {
        {"family", "linear"},
        {"agents", agents},
        {"budget", "expected_demand"},
        {"resource_names", {"cereal", "diapers", "pasta", "paper", "prepared_meals", "rice", "meat", "fruit", "produce"}},
        {"replications", 1000},
        {"seed", 1},
    };
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace fairalloc
