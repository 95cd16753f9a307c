#pragma once

#include <memory>
#include <random>
#include <vector>

#include "fairalloc/core.hpp"

namespace fairalloc::test {

inline AgentProfile point_agent(double theta, double size = 1.0) {
  return {size, {{AgentType::demand(theta)}, {1.0}}};
}

inline AgentProfile scalar_agent(std::vector<double> support, std::vector<double> probs, double size = 1.0) {
  AgentProfile a;
  a.size = size;
  for (double s : support) a.distribution.support.push_back(AgentType::demand(s));
  a.distribution.probabilities = std::move(probs);
  return a;
}

inline Instance filling_instance(std::vector<AgentProfile> agents, double budget) {
  Instance inst;
  inst.family = UtilityFamily::FillingRatio;
  inst.agents = std::move(agents);
  inst.resources.budgets = {budget};
  inst.resources.names = {"r0"};
  return inst;
}

inline std::shared_ptr<const Instance> share(Instance inst) {
  return std::make_shared<const Instance>(std::move(inst));
}

inline std::vector<AgentType> demands(std::initializer_list<double> values) {
  std::vector<AgentType> out;
  for (double v : values) out.push_back(AgentType::demand(v));
  return out;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

}  // namespace fairalloc::test
