#include <doctest.h>

#include <set>

#include <json.hpp>

#include "railplan/formulations.hpp"
#include "railplan/generator.hpp"
#include "railplan/instance_io.hpp"
#include "railplan/validation.hpp"
#include "support/fixtures.hpp"

using namespace railplan;
using namespace railtest;

TEST_CASE("40-ft split rounds half down") {
  CHECK(split40(10, 0.37) == 4);
  CHECK(split40(10, 0.35) == 3);
  CHECK(split40(10, 0.36) == 4);
  CHECK(split40(3, 0.5) == 1);
  CHECK(split40(7, 0.0) == 0);
  CHECK(split40(7, 1.0) == 7);
}

TEST_CASE("demand split over both container types") {
  Instance base = shuttle();
  GeneratorSpec spec;
  spec.share40Min = spec.share40Max = 0.37;
  spec.odTotals = {{0, 1, 10}};
  GeneratedDemands g = generateDemands(base, spec);
  REQUIRE(g.demands.size() == 2);
  CHECK(g.demands[0].type == ContainerType::T40);
  CHECK(g.demands[0].volume == 4);
  CHECK(g.demands[1].type == ContainerType::T53);
  CHECK(g.demands[1].volume == 6);
  CHECK(g.demands[0].release == g.demands[1].release);
  CHECK(g.warnings.empty());

  spec.share40Min = spec.share40Max = 1.0;
  g = generateDemands(base, spec);
  REQUIRE(g.demands.size() == 1);
  CHECK(g.demands[0].id == "od1-T40");
}

TEST_CASE("due dates leave slack over the shortest path") {
  Instance base = shuttle();
  GeneratorSpec spec;
  spec.odTotals = {{0, 1, 5}};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    spec.seed = seed;
    for (const Demand& d : generateDemands(base, spec).demands) {
      Demand probe = d;
      Minutes sp = shortestPathTime(buildNetwork(base), probe);
      Minutes window = cyclicDuration(d.release, d.due, base.T());
      CHECK(window == std::min<Minutes>(base.T() - 1, sp + static_cast<Minutes>(std::ceil(1.5 * sp))));
    }
  }
}

TEST_CASE("unreachable OD pairs are flagged") {
  Instance base = terminals(3);
  base.services.push_back(service("S", {{0, -1, 100}, {1, 400, -1}}));
  GeneratorSpec spec;
  spec.odTotals = {{0, 2, 4}};
  GeneratedDemands g = generateDemands(base, spec);
  CHECK(g.warnings.size() == 1);
}

TEST_CASE("fixed seeds reproduce demands and instances") {
  Instance base = shuttle();
  GeneratorSpec spec;
  spec.seed = 99;
  spec.odTotals = {{0, 1, 10}, {1, 0, 7}};
  CHECK(generateDemands(base, spec).demands == generateDemands(base, spec).demands);
  spec.seed = 100;
  CHECK(generateDemands(base, spec).demands != generateDemands(base, {99, spec.odTotals}).demands);
  CHECK(saveInstance(generateDeskInstance({}, 5)) == saveInstance(generateDeskInstance({}, 5)));
  CHECK(saveInstance(generateDeskInstance({}, 5)) != saveInstance(generateDeskInstance({}, 6)));
}

TEST_CASE("many OD pairs are all populated") {
  SizeParams p;
  p.terminals = 14;
  p.services = 40;
  Instance base = generateSyntheticNetwork(p, 1);
  GeneratorSpec spec;
  for (int o = 0; o < 14 && spec.odTotals.size() < 165; ++o)
    for (int d = 0; d < 14 && spec.odTotals.size() < 165; ++d)
      if (o != d) spec.odTotals.push_back({o, d, 20});
  REQUIRE(spec.odTotals.size() == 165);
  GeneratedDemands g = generateDemands(base, spec);
  std::set<std::pair<int, int>> pairs;
  for (const Demand& d : g.demands) pairs.insert({d.origin, d.destination});
  CHECK(pairs.size() == 165);
  int total = 0;
  for (const Demand& d : g.demands) total += d.volume;
  CHECK(total == 165 * 20);
}

TEST_CASE("fleet scenarios") {
  CHECK(fleetScenarios().size() == 7);
  Instance in = shuttle();
  in.railcars = standardRailcars();
  Instance five = applyFleetScenario(in, 5);
  REQUIRE(five.railcars.size() == 1);
  CHECK(five.railcars[0].id == "5x53");
  CHECK(five.railcars[0].platformCount == 5);
  CHECK(applyFleetScenario(in, 7).railcars.size() == 6);
  Instance two = applyFleetScenario(in, 2);
  CHECK(applyFleetScenario(two, 2) == two);
  CHECK(two.railcars.size() == 2);
  CHECK_THROWS_AS(applyFleetScenario(in, 8), std::out_of_range);
  CHECK_THROWS_AS(fleetScenario(0), std::out_of_range);

  in.railcars[1].fleetLimit = 3;  // own definitions win over the standard ones
  CHECK(applyFleetScenario(in, 1).railcars[0].fleetLimit == 3);
}

TEST_CASE("extra candidates mirror the schedule") {
  Instance in = generateDeskInstance({}, 2);
  Instance x = duplicateAsExtras(in);
  CHECK(x.services.size() == 2 * in.services.size());
  for (std::size_t s = 0; s < in.services.size(); ++s) {
    const TrainService& a = in.services[s];
    const TrainService& b = x.services[in.services.size() + s];
    CHECK(b.isExtra());
    CHECK(b.stops == a.stops);
    CHECK(b.legs == a.legs);
    CHECK(b.minLoadFraction == 0.5);
    TrainService bare = b;
    bare.fixedCost.reset();
    CHECK(*b.fixedCost == extraServiceCost(bare, in.costs));
  }
  CHECK(duplicateAsExtras(x).services.size() == x.services.size() + in.services.size());
  CHECK(withoutExtras(x) == in);
  CHECK(validateInstance(x).valid());
}

TEST_CASE("synthetic networks") {
  SizeParams p;
  p.terminals = 2;
  p.services = 1;
  p.legsPerService = 1;
  Instance tiny = generateSyntheticNetwork(p, 3);
  CHECK(tiny.terminals.size() == 2);
  CHECK(tiny.services.size() == 1);
  CHECK(validateInstance(tiny).valid());
  CHECK(tiny.railcars.size() == 6);

  Instance desk = generateSyntheticNetwork({}, 4);
  std::set<int> touched;
  for (const auto& s : desk.services)
    for (const auto& st : s.stops) touched.insert(st.terminal);
  CHECK(touched.size() == 5);
  CHECK(validateInstance(desk).valid());
  CHECK_THROWS_AS(generateSyntheticNetwork({1}, 1), std::invalid_argument);
}

TEST_CASE("desk instance") {
  std::vector<std::string> warnings;
  Instance in = generateDeskInstance({}, 8, &warnings);
  CHECK(validateInstance(in).valid());
  std::set<std::pair<int, int>> pairs;
  for (const Demand& d : in.demands) pairs.insert({d.origin, d.destination});
  CHECK(pairs.size() == 10);
  for (const Demand& d : in.demands) CHECK(d.volume >= 1);
}

TEST_CASE("demand asymmetry") {
  Instance in = shuttle();
  in.demands = {demand("a", 0, 1, 0, 10, 30), demand("b", 1, 0, 0, 10, 10), demand("c", 0, 1, 0, 10, 10)};
  auto a = demandAsymmetry(in);
  REQUIRE(a.size() == 1);
  CHECK(a[0].forward == 40);
  CHECK(a[0].backward == 10);
  CHECK(a[0].percent == doctest::Approx(75.0));
}

TEST_CASE("manifest") {
  std::string m = manifestJson({{"instance-1.json", 1, R"({"scenario": 7})", "abc"}});
  auto doc = nlohmann::json::parse(m);
  CHECK(doc["instances"][0]["seed"] == 1);
  CHECK(doc["instances"][0]["spec"]["scenario"] == 7);
}
