#include <doctest.h>

#include <cmath>
#include <random>

#include "fairalloc/distributions.hpp"
#include "fairalloc/policies.hpp"
#include "helpers.hpp"

using namespace fairalloc;
using namespace fairalloc::test;

namespace {

// Two agents, each 0.8 or 1.2 with equal odds, budget 2.
std::shared_ptr<const Instance> two_point_pair() {
  AgentProfile a{1.0, two_point_uniform(0.8, 1.2)};
  return share(filling_instance({a, a}, 2.0));
}

std::shared_ptr<const Instance> random_filling(std::mt19937_64& gen, std::size_t n, bool unit_sizes) {
  std::vector<AgentProfile> agents;
  double mean_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t atoms = 1 + gen() % 4;
    std::vector<double> support, probs;
    double mass = 0.0;
    for (std::size_t s = 0; s < atoms; ++s) {
      support.push_back(std::round(uniform(gen, 1.0, 20.0) * 4.0) / 4.0 + 0.001 * static_cast<double>(s));
      probs.push_back(uniform(gen, 0.1, 1.0));
      mass += probs.back();
    }
    for (auto& p : probs) p /= mass;
    const double size = unit_sizes ? 1.0 : 1.0 + static_cast<double>(gen() % 3);
    auto a = scalar_agent(support, probs, size);
    mean_total += size * a.distribution.mean()[0];
    agents.push_back(std::move(a));
  }
  return share(filling_instance(std::move(agents), mean_total * uniform(gen, 0.6, 1.3)));
}

std::vector<AgentType> sample(const Instance& inst, std::mt19937_64& gen) {
  std::vector<AgentType> out;
  for (const auto& a : inst.agents) out.push_back(draw(a.distribution, SeededRng::uniform(gen)));
  return out;
}

}  // namespace

TEST_SUITE("policies") {

TEST_CASE("names round-trip") {
  for (PolicyId id : all_policies()) CHECK(parse_policy(policy_name(id)) == id);
  CHECK_THROWS(parse_policy("hope"));
  CHECK(all_policies().size() == 9);
  CHECK(online_policies(UtilityFamily::FillingRatio).size() == 8);
  CHECK(online_policies(UtilityFamily::Linear).size() == 5);
  CHECK_FALSE(supports_family(PolicyId::MaxMin, UtilityFamily::Linear));
}

TEST_CASE("hope online on the two-point pair") {
  // Program: 1.2 with weight 1 + 0.5, 0.8 with weight 0.5; 0.4 + 1.5 w = 2.
  auto inst = two_point_pair();
  PolicyState state(inst);
  const auto out = propose(PolicyId::HopeOnline, state, AgentType::demand(1.2));
  CHECK(out.allocation[0] == doctest::Approx(1.6 / 1.5));
  CHECK(*out.threshold == doctest::Approx(1.6 / 1.5));
  CHECK(state.index == 0);
  CHECK(state.remaining[0] == 2.0);

  const auto h = hope_online_histogram(state, AgentType::demand(1.2));
  REQUIRE(h.size() == 2);
  CHECK(h.entries()[h.find(AgentType::demand(1.2)).value()].weight == 1.5);
  CHECK(h.entries()[h.find(AgentType::demand(0.8)).value()].weight == 0.5);

  commit(state, AgentType::demand(1.2), out.allocation);
  CHECK(state.index == 1);
  CHECK(state.remaining[0] == doctest::Approx(2.0 - 1.6 / 1.5));
  CHECK(state.beta_min == doctest::Approx(1.6 / 1.5 / 1.2));
  // The last agent gets whatever it needs from what is left.
  const auto last = step(PolicyId::HopeOnline, state, AgentType::demand(1.2));
  CHECK(last.allocation[0] == doctest::Approx(2.0 - 1.6 / 1.5));
  CHECK(state.complete());
  CHECK_THROWS_AS(propose(PolicyId::HopeOnline, state, AgentType::demand(1.2)), PolicyError);
}

TEST_CASE("full variants keep the original budget and the realized past") {
  auto inst = two_point_pair();
  PolicyState state(inst);
  commit(state, AgentType::demand(0.8), std::vector<double>{0.8});
  const auto h = hope_full_histogram(state, AgentType::demand(1.2));
  CHECK(h.total_weight() == 2.0);
  CHECK(h.entries()[h.find(AgentType::demand(0.8)).value()].weight == 1.0);
  const auto out = propose(PolicyId::HopeFull, state, AgentType::demand(1.2));
  CHECK(out.allocation[0] == doctest::Approx(1.2));

  const auto et = expected_type_histogram(state, AgentType::demand(1.2), true);
  CHECK(et.size() == 2);
  const auto et_online = expected_type_histogram(state, AgentType::demand(1.2), false);
  CHECK(et_online.size() == 1);
}

TEST_CASE("expected-type programs use the mean demand") {
  auto inst = share(filling_instance({point_agent(4.0), scalar_agent({2.0, 10.0}, {0.5, 0.5})}, 8.0));
  PolicyState state(inst);
  const auto h = expected_type_histogram(state, AgentType::demand(4.0), false);
  REQUIRE(h.size() == 2);
  CHECK(h.find(AgentType::demand(6.0)).has_value());
  // Levels: 4 + 6 > 8, w = 4 for both.
  CHECK(propose(PolicyId::EtOnline, state, AgentType::demand(4.0)).allocation[0] == doctest::Approx(4.0));
}

TEST_CASE("greedy, adaptive threshold, proportional") {
  auto inst = share(filling_instance({point_agent(5.0), point_agent(5.0, 2.0), point_agent(5.0)}, 8.0));
  PolicyState state(inst);
  CHECK(propose(PolicyId::Greedy, state, AgentType::demand(5.0)).allocation[0] == 5.0);
  const auto adaptive = propose(PolicyId::AdaptiveThreshold, state, AgentType::demand(5.0));
  CHECK(adaptive.allocation[0] == doctest::Approx(8.0 / 3.0));
  CHECK(*adaptive.threshold == doctest::Approx(8.0 / 3.0));
  CHECK(propose(PolicyId::Proportional, state, AgentType::demand(5.0)).allocation[0] == 2.0);
  commit(state, AgentType::demand(5.0), std::vector<double>{5.0});
  // Three units left for an agent of size 2.
  CHECK(propose(PolicyId::Greedy, state, AgentType::demand(5.0)).allocation[0] == 1.5);
  CHECK(propose(PolicyId::AdaptiveThreshold, state, AgentType::demand(5.0)).allocation[0] == doctest::Approx(0.75));
}

TEST_CASE("maxmin by hand") {
  // Unit sizes, point masses 2, 4, 6 (medians = means, sd 0), budget 6.
  auto inst = share(filling_instance({point_agent(2.0), point_agent(4.0), point_agent(6.0)}, 6.0));
  PolicyState state(inst);
  // allotment = 6 (2 + 4) / 12 = 3; spread = (4 - 6) / 5; denom = 2 + 4 + 0.
  auto out = step(PolicyId::MaxMin, state, AgentType::demand(2.0));
  CHECK(*out.threshold == doctest::Approx(1.0));
  CHECK(out.allocation[0] == doctest::Approx(1.0));
  CHECK(state.beta_min == doctest::Approx(0.5));
  // allotment = 5 (4 + 6) / 10 = 5; no spread; denom = 4 + 6 -> level 2.
  out = step(PolicyId::MaxMin, state, AgentType::demand(4.0));
  CHECK(out.allocation[0] == doctest::Approx(2.0));
  // Last agent: min(beta theta, remaining) = min(0.5 * 6, 3).
  out = step(PolicyId::MaxMin, state, AgentType::demand(6.0));
  CHECK(out.allocation[0] == doctest::Approx(3.0));
}

TEST_CASE("maxmin refuses what it is not defined for") {
  auto sized = share(filling_instance({point_agent(2.0, 2.0), point_agent(2.0)}, 4.0));
  PolicyState state(sized);
  CHECK_THROWS_AS(propose(PolicyId::MaxMin, state, AgentType::demand(2.0)), PolicyError);

  Instance lin;
  lin.family = UtilityFamily::Linear;
  lin.resources.budgets = {1.0};
  lin.agents.push_back({1.0, {{AgentType::preferences({1.0})}, {1.0}}});
  const std::vector<AgentType> realized{AgentType::preferences({1.0})};
  CHECK_THROWS_AS(run_policy(PolicyId::MaxMin, share(lin), realized), PolicyError);
  CHECK_THROWS_AS(run_policy(PolicyId::Greedy, share(lin), realized), PolicyError);
}

TEST_CASE("point masses make every program policy the hindsight optimum") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<AgentProfile> agents;
    std::vector<AgentType> realized;
    const std::size_t n = 1 + gen() % 8;
    for (std::size_t i = 0; i < n; ++i) {
      const double theta = uniform(gen, 1.0, 10.0);
      agents.push_back(point_agent(theta, 1.0 + static_cast<double>(gen() % 2)));
      realized.push_back(AgentType::demand(theta));
    }
    auto inst = share(filling_instance(agents, uniform(gen, 5.0, 40.0)));
    const auto opt = run_policy(PolicyId::Offline, inst, realized).allocation;
    for (PolicyId p : {PolicyId::HopeOnline, PolicyId::HopeFull, PolicyId::EtOnline, PolicyId::EtFull}) {
      const auto x = run_policy(p, inst, realized).allocation;
      for (std::size_t i = 0; i < n; ++i) CHECK(x(i, 0) == doctest::Approx(opt(i, 0)).epsilon(1e-9));
    }
  }
}

TEST_CASE("every policy stays feasible on random instances") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    const bool unit = trial % 2 == 0;
    auto inst = random_filling(gen, 1 + gen() % 10, unit);
    const auto realized = sample(*inst, gen);
    for (PolicyId p : all_policies()) {
      if (p == PolicyId::MaxMin && !unit) continue;
      const auto res = run_policy(p, inst, realized);
      CHECK(is_feasible(res.allocation, *inst));
      CHECK(res.thresholds.size() == inst->agent_count());
      for (std::size_t i = 0; i < inst->agent_count(); ++i) {
        // Nobody gets more than their demand, except Proportional which ignores it.
        if (p != PolicyId::Proportional) CHECK(res.allocation(i, 0) <= realized[i].demand() + 1e-12);
      }
    }
  }
}

TEST_CASE("linear policies stay feasible") {
  std::mt19937_64 gen(9);
  const auto prefs = bernoulli_preference_profiles(kProductWeights, 8, gen);
  Instance inst;
  inst.family = UtilityFamily::Linear;
  inst.resources.budgets.assign(9, 0.0);
  for (double m : kFbstMeans) {
    inst.agents.push_back({m / 10.0, prefs});
    for (std::size_t k = 0; k < 9; ++k) inst.resources.budgets[k] += m / 10.0 * prefs.mean()[k];
  }
  auto shared = share(inst);
  const auto realized = sample(inst, gen);
  for (PolicyId p : online_policies(UtilityFamily::Linear)) {
    const auto res = run_policy(p, shared, realized);
    CHECK(res.converged);
    CHECK(is_feasible(res.allocation, inst));
  }
}

TEST_CASE("first step of the full and online programs agree") {
  auto inst = two_point_pair();
  PolicyState state(inst);
  const auto online = propose(PolicyId::HopeOnline, state, AgentType::demand(1.2));
  const auto full = propose(PolicyId::HopeFull, state, AgentType::demand(1.2));
  CHECK(online.allocation == full.allocation);
  // Expected-type program: demands 1.2 and E[theta] = 1.0 on budget 2.
  const auto et = propose(PolicyId::EtOnline, state, AgentType::demand(1.2));
  CHECK(et.allocation[0] == doctest::Approx(1.0));
  CHECK(*et.threshold == doctest::Approx(1.0));
}

TEST_CASE("maxmin two-agent example") {
  // mu = (5, 5), second agent point mass at 5, B = 10, theta_1 = 6:
  // allotment 10, level 10 * 6 / (6 + 5).
  auto inst = share(filling_instance({scalar_agent({4.0, 6.0}, {0.5, 0.5}), point_agent(5.0)}, 10.0));
  PolicyState state(inst);
  const auto out = propose(PolicyId::MaxMin, state, AgentType::demand(6.0));
  CHECK(out.allocation[0] == doctest::Approx(60.0 / 11.0));
}

TEST_CASE("baseline policy examples") {
  auto g = share(filling_instance({point_agent(3.0), point_agent(4.0)}, 5.0));
  const auto greedy = run_policy(PolicyId::Greedy, g, demands({3.0, 4.0})).allocation;
  CHECK(greedy(0, 0) == 3.0);
  CHECK(greedy(1, 0) == 2.0);

  auto a = two_point_pair();
  const auto adaptive = run_policy(PolicyId::AdaptiveThreshold, a, demands({1.2, 0.8})).allocation;
  CHECK(adaptive(0, 0) == 1.0);
  CHECK(adaptive(1, 0) == 0.8);

  auto ample = share(filling_instance({point_agent(2.0), point_agent(3.0)}, 10.0));
  const auto all = run_policy(PolicyId::Greedy, ample, demands({2.0, 3.0})).allocation;
  CHECK(all(0, 0) == 2.0);
  CHECK(all(1, 0) == 3.0);

  Instance lin;
  lin.family = UtilityFamily::Linear;
  lin.resources.budgets = {2.0, 4.0};
  const AgentProfile p{1.0, {{AgentType::preferences({1.0, 1.0})}, {1.0}}};
  lin.agents = {p, p};
  const std::vector<AgentType> t(2, AgentType::preferences({1.0, 1.0}));
  const auto prop = run_policy(PolicyId::Proportional, share(lin), t).allocation;
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(prop(i, 0) == 1.0);
    CHECK(prop(i, 1) == 2.0);
  }
}

}  // TEST_SUITE
