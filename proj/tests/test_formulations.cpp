#include <doctest.h>

#include <json.hpp>

#include "railplan/formulations.hpp"
#include "railplan/pipeline.hpp"
#include "support/fixtures.hpp"
#include "support/tiny_instances.hpp"

using namespace railplan;
using namespace railtest;
using milp::VarKind;

namespace {

milp::SolveResult solveExact(const BuiltModel& m) {
  milp::SolverOptions o;
  o.gapTarget = 0;
  return milp::makeBackend()->solve(m.model, o);
}

double value(const BuiltModel& m, const milp::SolveResult& r, milp::VarKey key) {
  auto c = m.registry.find(key);
  return c ? r.values[*c] : 0.0;
}

milp::VarKey key(VarKind k, int a, int b = -1, int c = -1, int d = -1) { return {k, {a, b, c, d}}; }

// One block T1 -> T2 and its return, one demand of `n` containers.
Prepared oneBlock(int n, ContainerType type, std::vector<RailcarType> cars, int capacity = 3000) {
  Instance in = terminals(2);
  in.services.push_back(service("out", {{0, -1, 100}, {1, 400, -1}}, capacity));
  in.services.push_back(service("back", {{1, -1, 600}, {0, 900, -1}}, capacity));
  in.demands.push_back(demand("d", 0, 1, 50, 1000, n, type));
  in.railcars = std::move(cars);
  return prepare(in);
}

}  // namespace

TEST_CASE("parse formulation names") {
  CHECK(parseFormulation("ssndrm") == Formulation::SsndRm);
  CHECK(parseFormulation("unrestricted-fleet") == Formulation::UnrestrictedFleet);
  CHECK(parseFormulation("ul") == Formulation::UnrestrictedLoading);
  CHECK_THROWS_AS(parseFormulation("x"), std::invalid_argument);
  for (Formulation f : kFormulations) CHECK(parseFormulation(toString(f)) == f);
}

TEST_CASE("loading patterns") {
  auto pats = loadPatterns();
  CHECK(pats.size() == 8);
  for (const auto& p : pats)
    if (p.platform == PlatformType::P40) {
      CHECK(p.first == ContainerType::T40);  // 53 never alone or underneath on a 40-ft well
    }
}

TEST_CASE("cost coefficients") {
  CostParams c;
  TrainService x = service("x", {{0, -1, 0}, {1, 300, 360}, {2, 600, -1}}, 7000);
  x.legs[0].distance = 500;
  x.legs[1].distance = 300;
  x.kind = ServiceKind::ExtraCandidate;
  CHECK(extraServiceCost(x, c) == Money::fromDouble(756000));
  x.fixedCost = Money::fromDouble(1234.5);
  CHECK(extraServiceCost(x, c) == Money::fromDouble(1234.5));

  CHECK(allocationCost(car("5x53"), c) == Money::fromDouble(1000));
  CHECK(allocationCost(car("1x40"), c) == Money::fromDouble(200));
  CHECK(mixedPairCapacity(car("1x40")) == 1);
  CHECK(mixedPairCapacity(car("3x40")) == 2);
  CHECK(mixedPairCapacity(car("5x40")) == 3);
  CHECK(mixedPairCapacity(car("3x53")) == 0);

  BlockPath b;
  b.transferWait = 30;
  b.borderCrossings = 1;
  b.distance = 400;
  CHECK(emptyCarCost(b, c) == Money::fromDouble(30 + 1000 + 300));
  CompatibleBlock kb{0, 10, 120};
  CHECK(blockFlowCost(b, kb, c) == Money::fromDouble(30 + 1000 + 300 + 120));
}

TEST_CASE("zero demand") {
  Prepared p = oneBlock(1, ContainerType::T40, {car("1x53", 2)});
  p.inst.demands.clear();
  p.cat = generateBlocks(p.inst, p.net);
  for (Formulation f : kFormulations) {
    BuiltModel m = buildFormulation(f, p.inst, p.cat, p.net);
    milp::SolveResult r = solveExact(m);
    REQUIRE(r.status == milp::SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(0));
    for (double v : r.values) CHECK(v == doctest::Approx(0));
  }
}

TEST_CASE("structure per formulation") {
  Prepared p = oneBlock(3, ContainerType::T53, {car("1x53", 3), car("3x40", 2)});
  BuiltModel rm = buildSsndRm(p.inst, p.cat, p.net);
  BuiltModel uf = buildUnrestrictedFleet(p.inst, p.cat, p.net);
  BuiltModel ul = buildUnrestrictedLoading(p.inst, p.cat, p.net);
  CHECK(rm.registry.count(VarKind::EmptyCars) > 0);
  CHECK(rm.registry.count(VarKind::Allocation) > 0);
  for (VarKind k : {VarKind::EmptyCars, VarKind::Allocation, VarKind::PoolInventory}) CHECK(uf.registry.count(k) == 0);
  CHECK(uf.registry.count(VarKind::LoadedCars) > 0);
  for (VarKind k : {VarKind::LoadedCars, VarKind::EmptyCars, VarKind::Allocation, VarKind::PoolInventory,
                    VarKind::SinglePlatform, VarKind::PairPlatform})
    CHECK(ul.registry.count(k) == 0);
  CHECK(rm.registry.size() == static_cast<std::size_t>(rm.model.numVariables()));
  CHECK(rm.model.numVariables() > 0);
  rm.model.validate();
  uf.model.validate();
  ul.model.validate();
  CHECK(rm.instanceFingerprint == uf.instanceFingerprint);
  CHECK(rm.catalogFingerprint == ul.catalogFingerprint);
}

TEST_CASE("explain lists every row with its family") {
  Prepared p = oneBlock(2, ContainerType::T40, {car("3x40", 2)});
  BuiltModel m = buildSsndRm(p.inst, p.cat, p.net);
  auto doc = nlohmann::json::parse(m.explainJson());
  CHECK(doc["formulation"] == "ssndrm");
  CHECK(doc["rows"].size() == static_cast<std::size_t>(m.model.numConstraints()));
  std::set<std::string> fams;
  for (const auto& [name, fam] : doc["rows"].items()) fams.insert(fam.get<std::string>());
  for (const char* f : {"demand_cover", "flow_link", "load_count", "platform_upper", "platform_lower", "mixed_top53",
                        "block_length", "pool_balance", "allocation", "fleet_cap", "regular_capacity"})
    CHECK(fams.count(f) == 1);
}

TEST_CASE("two 40-ft boxes need one double-stacked 1x53 car") {
  Prepared p = oneBlock(2, ContainerType::T40, {car("1x53", 1)});
  BuiltModel uf = buildUnrestrictedFleet(p.inst, p.cat, p.net);
  milp::SolveResult r = solveExact(uf);
  REQUIRE(r.status == milp::SolveStatus::Optimal);
  REQUIRE(p.cat.demandBlocks[0].size() == 1);
  const CompatibleBlock kb = p.cat.demandBlocks[0][0];
  CHECK(value(uf, r, key(VarKind::LoadedCars, 0, kb.block)) == doctest::Approx(1));
  CHECK(value(uf, r, key(VarKind::Unmet, 0)) == doctest::Approx(0));
  const BlockPath& b = p.cat.blocks[kb.block];
  double expected = b.buildCost.toDouble() + 2 * blockFlowCost(b, kb, p.inst.costs).toDouble();
  CHECK(r.objective == doctest::Approx(expected));

  // the fleet model also pays the allocation and brings the car home
  milp::SolveResult full = solveExact(buildSsndRm(p.inst, p.cat, p.net));
  CHECK(full.objective > r.objective);
}

TEST_CASE("unrestricted loading counts half a container length") {
  Prepared p = oneBlock(10, ContainerType::T53, {car("1x53")}, 100);
  BuiltModel ul = buildUnrestrictedLoading(p.inst, p.cat, p.net);
  milp::SolveResult r = solveExact(ul);
  REQUIRE(r.status == milp::SolveStatus::Optimal);
  CHECK(value(ul, r, key(VarKind::Unmet, 0)) == doctest::Approx(10 - 3));
}

TEST_CASE("53-ft boxes cannot ride alone on 40-ft wells") {
  Prepared p = oneBlock(1, ContainerType::T53, {car("5x40", 4)});
  milp::SolveResult r = solveExact(buildUnrestrictedFleet(p.inst, p.cat, p.net));
  CHECK(r.objective == doctest::Approx(p.inst.demands[0].outsourcingCost.toDouble()));
}

TEST_CASE("extra train minimum load") {
  Instance in = terminals(2);
  in.services.push_back(service("out", {{0, -1, 100}, {1, 400, -1}}, 140));
  in.services.push_back(service("back", {{1, -1, 600}, {0, 900, -1}}, 3000));
  TrainService x = in.services[0];
  x.id = "out-x";
  x.kind = ServiceKind::ExtraCandidate;
  x.fixedCost = Money::fromDouble(1000);
  x.legs[0].capacity = 1000;
  in.services.push_back(x);
  in.railcars = {car("1x53", 20)};

  SUBCASE("too little freight to open the extra train") {
    // half the extra's 1000 ft takes 8 cars, empties included, and only 6 exist
    in.railcars = {car("1x53", 6)};
    in.demands.push_back(demand("d", 0, 1, 50, 1000, 8, ContainerType::T53));
    Prepared p = prepare(in);
    BuiltModel m = buildSsndRm(p.inst, p.cat, p.net);
    milp::SolveResult r = solveExact(m);
    CHECK(value(m, r, key(VarKind::ExtraService, 2)) == doctest::Approx(0));
    CHECK(value(m, r, key(VarKind::Unmet, 0)) == doctest::Approx(4));
  }
  SUBCASE("enough freight") {
    in.demands.push_back(demand("d", 0, 1, 50, 1000, 20, ContainerType::T53));
    Prepared p = prepare(in);
    BuiltModel m = buildSsndRm(p.inst, p.cat, p.net);
    milp::SolveResult r = solveExact(m);
    CHECK(value(m, r, key(VarKind::ExtraService, 2)) == doctest::Approx(1));
    CHECK(value(m, r, key(VarKind::Unmet, 0)) == doctest::Approx(0));
  }
}

TEST_CASE("fleet ordering on tiny instances") {
  int checked = 0;
  for (std::uint64_t seed = 1; checked < 15; ++seed) {
    Prepared p = prepare(tinyInstance(seed));
    double rm = solveExact(buildSsndRm(p.inst, p.cat, p.net)).objective;
    double uf = solveExact(buildUnrestrictedFleet(p.inst, p.cat, p.net)).objective;
    CHECK(uf <= rm + 1e-6 * std::max(1.0, std::abs(rm)));
    ++checked;
  }
}

TEST_CASE("fixing the integer part reproduces an audited objective") {
  auto be = milp::makeBackend();
  for (std::uint64_t seed : {2u, 7u, 13u}) {
    Prepared p = prepare(tinyInstance(seed));
    RunOptions opt = runOptionsFor(p.inst);
    RunOutcome run = runFormulation(p, Formulation::SsndRm, opt, *be);
    REQUIRE(run.solved());
    REQUIRE(run.audit.ok());
    std::vector<std::pair<int, double>> fix;
    for (int j = 0; j < run.built.model.numVariables(); ++j)
      if (run.built.model.variable(j).integer) fix.push_back({j, std::round(run.result.values[j])});
    milp::SolveResult r = solveExact(BuiltModel{milp::fixVariables(run.built.model, fix), {}, {}, {}, {}});
    REQUIRE(r.hasSolution());
    CHECK(r.objective == doctest::Approx(run.audit.objective).epsilon(1e-9));
  }
}
