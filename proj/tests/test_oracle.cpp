#include <doctest.h>

#include <algorithm>

#include "railplan/generator.hpp"
#include "railplan/oracle.hpp"
#include "railplan/pipeline.hpp"
#include "support/fixtures.hpp"
#include "support/tiny_instances.hpp"

using namespace railplan;
using namespace railtest;
using oracle::ContainerCounts;

namespace {

std::vector<RailcarType> cars(std::initializer_list<std::pair<const char*, int>> spec) {
  std::vector<RailcarType> out;
  for (auto [id, n] : spec)
    for (int i = 0; i < n; ++i) out.push_back(car(id));
  return out;
}

double exactMilp(const Prepared& p) {
  milp::SolverOptions o;
  o.gapTarget = 0;
  auto built = buildFormulation(Formulation::SsndRm, p.inst, p.cat, p.net);
  auto r = milp::makeBackend()->solve(built.model, o);
  REQUIRE(r.status == milp::SolveStatus::Optimal);
  return r.objective;
}

}  // namespace

TEST_CASE("loading cases") {
  CHECK_FALSE(oracle::countingFeasible({0, 3}, cars({{"3x40", 1}})));
  CHECK_FALSE(oracle::slotLoadingFeasible({0, 3}, cars({{"3x40", 1}})));
  CHECK(oracle::countingFeasible({5, 3}, cars({{"5x40", 1}})));
  CHECK(oracle::slotLoadingFeasible({5, 3}, cars({{"5x40", 1}})));
  CHECK_FALSE(oracle::countingFeasible({5, 4}, cars({{"5x40", 1}})));
  CHECK_FALSE(oracle::slotLoadingFeasible({5, 4}, cars({{"5x40", 1}})));
  CHECK(oracle::countingFeasible({0, 0}, {}));
  CHECK_FALSE(oracle::countingFeasible({0, 1}, cars({{"1x40", 1}})));
  CHECK(oracle::countingFeasible({1, 1}, cars({{"1x40", 1}})));
  CHECK(oracle::countingFeasible({0, 2}, cars({{"1x53", 1}})));
  CHECK_FALSE(oracle::countingFeasible({1, 0}, {}));
}

TEST_CASE("single car loads") {
  auto loads = oracle::carLoads(car("1x40"));
  auto has = [&](ContainerCounts c) { return std::find(loads.begin(), loads.end(), c) != loads.end(); };
  CHECK(has({0, 0}));
  CHECK(has({1, 0}));
  CHECK(has({2, 0}));
  CHECK(has({1, 1}));
  CHECK_FALSE(has({0, 1}));
  CHECK_FALSE(has({0, 2}));
}

TEST_CASE("counting rows agree with slot assignment on small cases") {
  auto types = standardRailcars();
  REQUIRE(types.size() == 6);
  int cases = 0;
  std::vector<RailcarType> pick;
  auto visit = [&](auto&& self, std::size_t from) -> void {
    for (int n40 = 0; n40 <= 6; ++n40)
      for (int n53 = 0; n40 + n53 <= 6; ++n53) {
        ContainerCounts c{n40, n53};
        CHECK_MESSAGE(oracle::countingFeasible(c, pick) == oracle::slotLoadingFeasible(c, pick),
                      "n40=" << n40 << " n53=" << n53 << " cars=" << pick.size());
        ++cases;
      }
    if (pick.size() == 3) return;
    for (std::size_t t = from; t < types.size(); ++t) {
      pick.push_back(types[t]);
      self(self, t);
      pick.pop_back();
    }
  };
  visit(visit, 0);
  // 1 + 6 + 21 + 56 multisets, 28 container mixes each
  CHECK(cases == 84 * 28);
}

TEST_CASE("oracle matches the MILP on a loop service") {
  Instance in = terminals(2);
  in.services.push_back(service("loop", {{0, -1, 100}, {1, 400, 600}, {0, 900, -1}}));
  in.demands.push_back(demand("d", 0, 1, 50, 1000, 2, ContainerType::T40));
  in.railcars = {car("1x53", 1)};
  auto p = prepare(in);
  auto res = oracle::bruteForceOptimum(p.inst, p.cat);
  CHECK(res.plan.unmet[0] == 0);
  CHECK(res.objective.toDouble() == doctest::Approx(exactMilp(p)).epsilon(1e-9));
}

TEST_CASE("oracle edge cases") {
  SUBCASE("no demand costs nothing") {
    Instance in = shuttle();
    in.railcars = {car("3x40", 2)};
    auto p = prepare(in);
    CHECK(oracle::bruteForceOptimum(p.inst, p.cat).objective.toDouble() == 0);
  }
  SUBCASE("no feasible block outsources everything") {
    Instance in = shuttle();
    in.demands.push_back(demand("late", 0, 1, 50, 300, 3, ContainerType::T40));
    in.railcars = {car("3x40", 2)};
    auto p = prepare(in);
    auto res = oracle::bruteForceOptimum(p.inst, p.cat);
    CHECK(res.objective.toDouble() == doctest::Approx(3 * p.inst.demands[0].outsourcingCost.toDouble()));
    CHECK(res.plan.unmet[0] == 3);
  }
  SUBCASE("bounds are enforced") {
    Instance in = shuttle();
    in.demands.push_back(demand("big", 0, 1, 50, 1000, 7, ContainerType::T40));
    in.railcars = {car("3x40", 2)};
    auto p = prepare(in);
    CHECK_THROWS_AS(oracle::bruteForceOptimum(p.inst, p.cat), oracle::Refused);
    in.demands[0].volume = 2;
    in.railcars = {car("3x40")};
    p = prepare(in);
    CHECK_THROWS_AS(oracle::bruteForceOptimum(p.inst, p.cat), oracle::Refused);
    in.railcars = {car("3x40", 5)};
    p = prepare(in);
    CHECK_THROWS_AS(oracle::bruteForceOptimum(p.inst, p.cat), oracle::Refused);
  }
}

TEST_CASE("oracle agrees with the MILP on tiny instances") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto p = prepare(tinyInstance(seed));
    auto res = oracle::bruteForceOptimum(p.inst, p.cat);
    double m = exactMilp(p);
    CHECK_MESSAGE(res.objective.toDouble() == doctest::Approx(m).epsilon(1e-6), "seed " << seed);
  }
}
