#include <doctest.h>

#include "fairalloc/core.hpp"
#include "helpers.hpp"

using namespace fairalloc;
using namespace fairalloc::test;

TEST_SUITE("core") {

TEST_CASE("filling ratio utility caps at one") {
  const double half[] = {5.0};
  const double over[] = {30.0};
  CHECK(utility(half, AgentType::demand(10.0), UtilityFamily::FillingRatio) == doctest::Approx(0.5));
  CHECK(utility(over, AgentType::demand(10.0), UtilityFamily::FillingRatio) == 1.0);
}

TEST_CASE("linear utility is an inner product") {
  const double x[] = {1.0, 2.0, 3.0};
  CHECK(utility(x, AgentType::preferences({0.5, 0.0, 2.0}), UtilityFamily::Linear) == doctest::Approx(6.5));
  CHECK_THROWS(utility(x, AgentType::preferences({1.0}), UtilityFamily::Linear));
}

TEST_CASE("distribution summaries") {
  auto a = scalar_agent({1.0, 2.0, 4.0}, {0.25, 0.25, 0.5});
  const auto& d = a.distribution;
  CHECK(d.mean()[0] == doctest::Approx(2.75));
  CHECK(d.median() == 2.0);
  CHECK(d.variance() == doctest::Approx(0.25 * 1.0 + 0.25 * 4.0 + 0.5 * 16.0 - 2.75 * 2.75));
  CHECK(d.probability_of(AgentType::demand(4.0)) == 0.5);
  CHECK(d.probability_of(AgentType::demand(3.0)) == 0.0);
  CHECK(d.find(AgentType::demand(2.0)).value() == 1);
}

TEST_CASE("validation collects every problem") {
  Instance inst = filling_instance({point_agent(3.0), scalar_agent({1.0, 1.0}, {0.5, 0.6}), point_agent(-1.0, 0.0)}, -2.0);
  const auto v = validate_instance(inst);
  auto has = [&](std::optional<std::size_t> agent, const std::string& needle) {
    for (const auto& x : v) {
      if (x.agent == agent && x.message.find(needle) != std::string::npos) return true;
    }
    return false;
  };
  CHECK(has(std::nullopt, "budget"));
  CHECK(has(1, "sum to"));
  CHECK(has(1, "equal"));
  CHECK(has(2, "size must be positive"));
  CHECK(has(2, "demand must be positive"));
  CHECK_FALSE(has(0, ""));
  CHECK_THROWS_AS(require_valid(inst), InvalidInstance);
}

TEST_CASE("filling ratio needs exactly one resource") {
  Instance inst = filling_instance({point_agent(3.0)}, 1.0);
  inst.resources.budgets = {1.0, 1.0};
  inst.resources.names.clear();
  const auto v = validate_instance(inst);
  REQUIRE_FALSE(v.empty());
  CHECK(v.front().message.find("K=1") != std::string::npos);
}

TEST_CASE("linear atoms need a positive coordinate") {
  Instance inst;
  inst.family = UtilityFamily::Linear;
  inst.resources.budgets = {1.0, 1.0};
  inst.agents.push_back({1.0, {{AgentType::preferences({0.0, 0.0})}, {1.0}}});
  inst.agents.push_back({1.0, {{AgentType::preferences({1.0})}, {1.0}}});
  const auto v = validate_instance(inst);
  REQUIRE(v.size() == 2);
  CHECK(*v[0].agent == 0);
  CHECK(*v[1].agent == 1);
}

TEST_CASE("feasibility and consumption weigh by size") {
  Instance inst = filling_instance({point_agent(3.0, 2.0), point_agent(3.0, 1.0)}, 6.0);
  Allocation x(2, 1);
  x(0, 0) = 2.0;
  x(1, 0) = 2.0;
  CHECK(consumption(x, inst)[0] == 6.0);
  CHECK(is_feasible(x, inst));
  x(1, 0) = 2.0 + 1e-6;
  CHECK_FALSE(is_feasible(x, inst));
  x(1, 0) = -0.1;
  CHECK_FALSE(is_feasible(x, inst));
  CHECK(effective_size(inst) == 3.0);
}

TEST_CASE("lipschitz bound") {
  Instance fr = filling_instance({scalar_agent({2.0, 4.0}, {0.5, 0.5}), point_agent(8.0)}, 1.0);
  CHECK(lipschitz_bound(fr) == 0.5);
  Instance lin;
  lin.family = UtilityFamily::Linear;
  lin.resources.budgets = {1.0, 1.0};
  lin.agents.push_back({1.0, {{AgentType::preferences({1.0, 2.0}), AgentType::preferences({4.0, 0.5})}, {0.5, 0.5}}});
  CHECK(lipschitz_bound(lin) == 4.5);
}

}  // TEST_SUITE
