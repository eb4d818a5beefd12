#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "railplan/pipeline.hpp"
#include "support/fixtures.hpp"

using namespace railplan;
using namespace railtest;
using milp::VarKind;

namespace {

Prepared shuttleWith(int n, ContainerType type, std::vector<RailcarType> cars) {
  Instance in = shuttle();
  in.demands.push_back(demand("d", 0, 1, 50, 1000, n, type));
  in.railcars = std::move(cars);
  return prepare(in);
}

RunOutcome exact(const Prepared& p, Formulation f) {
  RunOptions o;
  o.warmStart = false;
  o.warm.gapTarget = 0;
  auto backend = milp::makeBackend();
  return runFormulation(p, f, o, *backend);
}

int col(const BuiltModel& m, VarKind k, int a, int b = -1, int c = -1, int d = -1) {
  auto j = m.registry.find({k, {a, b, c, d}});
  REQUIRE(j.has_value());
  return *j;
}

bool hasFamily(const AuditReport& r, const std::string& fam) {
  for (const auto& v : r.violations)
    if (v.family == fam) return true;
  return false;
}

AuditReport reaudit(const RunOutcome& r, const Prepared& p, const std::vector<double>& values) {
  PlanSolution s = r.plan;
  s.values = values;
  return auditSolution(s, r.built, p.inst, p.cat, p.net);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int countLines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

std::filesystem::path scratch(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("railplan_test_" + name);
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("optimal plans audit clean") {
  auto p = shuttleWith(3, ContainerType::T40, {car("3x40", 1)});
  for (Formulation f : kFormulations) {
    auto r = exact(p, f);
    REQUIRE(r.solved());
    CHECK(r.audit.ok());
    CHECK(r.audit.objective == doctest::Approx(r.result.objective));
  }
}

TEST_CASE("corrupted solutions are caught") {
  auto p = shuttleWith(3, ContainerType::T40, {car("3x40", 1)});
  auto r = exact(p, Formulation::SsndRm);
  REQUIRE(r.audit.ok());
  const auto& m = r.built;
  int used = -1;
  for (const auto& kb : p.cat.demandBlocks[0])
    if (r.plan.values[col(m, VarKind::BlockFlow, kb.block, 0)] > 0.5) used = kb.block;
  REQUIRE(used >= 0);

  SUBCASE("block switched off under its flow") {
    auto v = r.plan.values;
    v[col(m, VarKind::BlockSelect, used)] = 0;
    CHECK(hasFamily(reaudit(r, p, v), "flow_link"));
  }
  SUBCASE("fractional value") {
    auto v = r.plan.values;
    v[col(m, VarKind::BlockFlow, used, 0)] = 2.5;
    auto a = reaudit(r, p, v);
    CHECK(hasFamily(a, "integrality"));
    CHECK(hasFamily(a, "demand_cover"));
  }
  SUBCASE("fleet exceeded") {
    auto v = r.plan.values;
    v[col(m, VarKind::Allocation, 0, 0)] += 1;
    auto a = reaudit(r, p, v);
    CHECK(hasFamily(a, "fleet_cap"));
    CHECK(hasFamily(a, "pool_balance"));
  }
  SUBCASE("objective misreported") {
    PlanSolution s = r.plan;
    s.objective += 10;
    CHECK(hasFamily(auditSolution(s, r.built, p.inst, p.cat, p.net), "objective"));
  }
  SUBCASE("short value vector") {
    PlanSolution s = r.plan;
    s.values.pop_back();
    CHECK_FALSE(auditSolution(s, r.built, p.inst, p.cat, p.net).ok());
  }
}

TEST_CASE("inventory traces are periodic and within the fleet") {
  auto p = shuttleWith(6, ContainerType::T40, {car("3x40", 3), car("1x53", 2)});
  auto r = exact(p, Formulation::SsndRm);
  REQUIRE(r.solved());
  REQUIRE(r.audit.ok());
  REQUIRE(r.audit.fleetTotals.size() == 2);
  for (std::size_t g = 0; g < 2; ++g) {
    long long sum = 0;
    for (std::size_t t = 0; t < p.inst.terminals.size(); ++t)
      sum += std::llround(r.plan.values[col(r.built, VarKind::Allocation, int(g), int(t))]);
    CHECK(r.audit.fleetTotals[g] == sum);
    CHECK(sum <= *p.inst.railcars[g].fleetLimit);
  }
  CHECK(r.audit.fleetTotals[0] + r.audit.fleetTotals[1] > 0);
  for (const auto& tr : r.audit.inventory) {
    CHECK(tr.minimum >= 0);
    CHECK(tr.end == tr.start);
  }
}

TEST_CASE("metrics on small plans") {
  SUBCASE("everything outsourced") {
    auto p = shuttleWith(4, ContainerType::T53, {car("5x40", 2)});
    auto r = exact(p, Formulation::SsndRm);
    CHECK(r.metrics.unsatisfiedDemandPct == doctest::Approx(100));
    CHECK(r.metrics.capacityUsage == doctest::Approx(0));
    CHECK(r.metrics.platformCount == 0);
  }
  SUBCASE("three boxes on one 3-platform car use half the slots") {
    auto p = shuttleWith(3, ContainerType::T40, {car("3x40", 1)});
    auto r = exact(p, Formulation::UnrestrictedFleet);
    CHECK(r.metrics.unsatisfiedDemandPct == doctest::Approx(0));
    REQUIRE(r.metrics.slotUtilizationLoadedPct.has_value());
    CHECK(*r.metrics.slotUtilizationLoadedPct == doctest::Approx(50));
    CHECK(r.metrics.platformCount == 3);
    CHECK(r.metrics.pct3PlatformShare == doctest::Approx(100));
  }
  SUBCASE("capacity usage is length-distance over running capacity") {
    auto p = shuttleWith(3, ContainerType::T40, {car("3x40", 1)});
    auto r = exact(p, Formulation::UnrestrictedFleet);
    double len = p.inst.railcars[0].length;
    // one loaded car out, nothing back; both legs 300 km at 3000 ft
    CHECK(r.metrics.capacityUsage == doctest::Approx(100.0 * len * 300 / (2 * 3000.0 * 300)));
  }
  SUBCASE("UL has no car metrics") {
    auto p = shuttleWith(3, ContainerType::T40, {car("3x40", 1)});
    auto r = exact(p, Formulation::UnrestrictedLoading);
    CHECK_FALSE(r.metrics.slotUtilizationPct.has_value());
    CHECK(r.metrics.capacityUsage == doctest::Approx(100.0 * 60 * 300 / (2 * 3000.0 * 300)));
  }
}

TEST_CASE("model comparison") {
  auto p = shuttleWith(5, ContainerType::T40, {car("3x40", 1), car("1x53", 1)});
  std::vector<ModelRun> runs;
  for (Formulation f : kFormulations) {
    auto r = exact(p, f);
    REQUIRE(r.solved());
    runs.push_back({r.plan, r.metrics});
  }
  auto rows = compareModels(runs);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].formulation == Formulation::SsndRm);
  CHECK(rows[0].usageDiffPct == doctest::Approx(0));
  CHECK(rows[1].objective <= rows[0].objective + 1e-6);

  auto self = compareModels({runs[0]});
  CHECK(self[0].usageDiffPct == doctest::Approx(0));

  auto bad = runs;
  bad[1].solution.instanceFingerprint = "other";
  CHECK_THROWS_AS(compareModels(bad), std::invalid_argument);
}

TEST_CASE("UL ignores the fleet scenario") {
  DeskParams dp;
  dp.size.terminals = 4;
  dp.size.services = 4;
  dp.odPairs = 6;
  Instance base = generateDeskInstance(dp, 3);
  double first = -1, objective = -1;
  for (int sc = 1; sc <= 7; ++sc) {
    auto p = prepare(applyFleetScenario(base, sc));
    auto r = exact(p, Formulation::UnrestrictedLoading);
    REQUIRE(r.solved());
    if (sc == 1) {
      first = r.metrics.unsatisfiedDemandPct;
      objective = r.result.objective;
    }
    CHECK(r.metrics.unsatisfiedDemandPct == doctest::Approx(first));
    CHECK(r.result.objective == doctest::Approx(objective));
  }
}

TEST_CASE("report export") {
  SUBCASE("empty batch writes headers only") {
    auto dir = scratch("empty");
    exportReports({}, dir);
    CHECK(countLines(slurp(dir / "runs.csv")) == 1);
    CHECK(countLines(slurp(dir / "model_comparison.csv")) == 1);
    CHECK(countLines(slurp(dir / "fleet_composition.csv")) == 1);
    CHECK(slurp(dir / "block_composition.json") == "[]\n");
    CHECK(std::filesystem::exists(dir / "manifest.json"));
  }
  SUBCASE("five seeds by seven scenarios") {
    auto p = shuttleWith(3, ContainerType::T40, {car("3x40", 1)});
    auto r = exact(p, Formulation::SsndRm);
    std::vector<BatchRecord> batch;
    for (int seed = 1; seed <= 5; ++seed)
      for (int sc = 1; sc <= 7; ++sc) {
        BatchRecord b;
        b.instance = "seed" + std::to_string(seed);
        b.seed = seed;
        b.scenario = std::to_string(sc);
        b.status = "optimal";
        b.run = {r.plan, r.metrics};
        batch.push_back(b);
      }
    auto dir = scratch("batch");
    exportReports(batch, dir, R"({"seeds":5})");
    std::string runs = slurp(dir / "runs.csv");
    CHECK(countLines(runs) == 36);
    CHECK(countLines(slurp(dir / "model_comparison.csv")) == 36);
    CHECK(countLines(slurp(dir / "fleet_composition.csv")) == 36);
    CHECK(runs.rfind("instance,seed,scenario,formulation,", 0) == 0);

    auto again = scratch("batch2");
    exportReports(batch, again, R"({"seeds":5})");
    for (const char* f : {"runs.csv", "model_comparison.csv", "fleet_composition.csv", "demand_profile.json",
                          "block_composition.json", "manifest.json"})
      CHECK(slurp(dir / f) == slurp(again / f));
  }
  SUBCASE("unwritable directory") {
    auto dir = scratch("blocked");
    std::ofstream(dir.string()) << "file";
    CHECK_THROWS_AS(exportReports({}, dir / "sub"), std::runtime_error);
    std::filesystem::remove(dir);
  }
}

TEST_CASE("solution files round trip") {
  auto p = shuttleWith(3, ContainerType::T40, {car("3x40", 1)});
  auto r = exact(p, Formulation::SsndRm);
  std::string json = solutionJson(r);
  auto h = readSolutionHeader(json);
  CHECK(h.formulation == Formulation::SsndRm);
  CHECK(h.instanceFingerprint == r.built.instanceFingerprint);
  PlanSolution back = readSolution(json, r.built);
  REQUIRE(back.values.size() == r.plan.values.size());
  for (std::size_t j = 0; j < back.values.size(); ++j) CHECK(back.values[j] == doctest::Approx(r.plan.values[j]));
  CHECK(auditSolution(back, r.built, p.inst, p.cat, p.net).ok());

  auto other = exact(p, Formulation::UnrestrictedFleet);
  CHECK_THROWS_AS(readSolution(json, other.built), std::invalid_argument);
}
