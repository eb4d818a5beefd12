#include <doctest.h>

#include <cmath>
#include <map>

#include "railplan/generator.hpp"
#include "railplan/oracle.hpp"
#include "railplan/pipeline.hpp"
#include "support/backends.hpp"
#include "support/fixtures.hpp"
#include "support/tiny_instances.hpp"

using namespace railplan;
using namespace railtest;
using milp::VarKind;

namespace {

Prepared deskWithExtras(std::uint64_t seed) {
  Instance in = generateDeskInstance({}, seed);
  in = duplicateAsExtras(applyFleetScenario(in, 4));
  return prepare(in);
}

WarmStartConfig exactConfig() {
  WarmStartConfig c;
  c.gapTarget = 0;
  return c;
}

// Replays the fixing rule from the recorded stage solutions.
std::vector<milp::ModelSpec> replayStages(const BuiltModel& m, const std::vector<milp::SolveResult>& sols,
                                          double eps) {
  const auto& reg = m.registry;
  auto cols = [&](std::initializer_list<VarKind> kinds) {
    std::vector<int> v;
    for (VarKind k : kinds) {
      auto c = reg.columnsOf(k);
      v.insert(v.end(), c.begin(), c.end());
    }
    return v;
  };
  const std::vector<int> s = cols({VarKind::ExtraService});
  const std::vector<std::vector<int>> groups{
      cols({VarKind::BlockSelect, VarKind::LoadedCars}),
      cols({VarKind::EmptyCars, VarKind::Allocation, VarKind::PoolInventory})};
  const std::vector<int> tail = cols({VarKind::BlockFlow, VarKind::Unmet, VarKind::SinglePlatform, VarKind::PairPlatform});

  std::vector<milp::ModelSpec> out;
  milp::ModelSpec cur = milp::relaxAll(m.model);
  out.push_back(cur);
  std::size_t stage = 0;
  auto fixZero = [&](const std::vector<int>& group, milp::ModelSpec& spec) {
    std::vector<std::pair<int, double>> fix;
    std::vector<int> ints;
    for (int j : group) {
      bool already = spec.variable(j).lower == spec.variable(j).upper;
      if (already) continue;
      if (sols[stage].values[j] < eps) fix.push_back({j, 0.0});
      else ints.push_back(j);
    }
    spec = milp::setIntegrality(milp::fixVariables(spec, fix), ints, true);
  };
  if (!s.empty()) {
    fixZero(s, cur);
    out.push_back(cur);
    ++stage;
  }
  std::vector<std::pair<int, double>> fixS;
  for (int j : s)
    if (cur.variable(j).lower != cur.variable(j).upper) fixS.push_back({j, std::round(sols[stage].values[j])});
  cur = milp::fixVariables(milp::setIntegrality(cur, {}, true), fixS);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    fixZero(groups[g], cur);
    if (g + 1 == groups.size()) {
      std::vector<int> ints;
      for (int j : tail)
        if (cur.variable(j).lower != cur.variable(j).upper) ints.push_back(j);
      cur = milp::setIntegrality(cur, ints, true);
    }
    out.push_back(cur);
    ++stage;
  }
  return out;
}

}  // namespace

TEST_CASE("variable partition") {
  Prepared p = deskWithExtras(1);
  BuiltModel m = buildSsndRm(p.inst, p.cat, p.net);
  VariablePartition part = partitionVariables(m.registry);
  std::size_t total = part.extraGroup.size() + part.tailGroup.size();
  for (const auto& g : part.orderedGroups) total += g.size();
  CHECK(total == m.registry.size());
  CHECK(part.extraGroup.size() == m.registry.count(VarKind::ExtraService));

  CHECK_THROWS_AS(partitionVariables(m.registry, {{VarKind::BlockSelect}, {VarKind::BlockSelect}}), std::invalid_argument);
  CHECK_THROWS_AS(partitionVariables(m.registry, {{VarKind::BlockSelect}}), std::invalid_argument);
  CHECK_THROWS_AS(partitionVariables(m.registry, {{VarKind::BlockFlow, VarKind::BlockSelect, VarKind::LoadedCars,
                                                   VarKind::EmptyCars, VarKind::Allocation, VarKind::PoolInventory}}),
                  std::invalid_argument);
}

TEST_CASE("stage models follow the fixing rule") {
  Prepared p = deskWithExtras(2);
  BuiltModel m = buildSsndRm(p.inst, p.cat, p.net);
  RecordingBackend be;
  WarmStartConfig cfg = warmStartConfigFor(p.inst.config);
  WarmStartOutcome w = computeWarmStart(m, cfg, be);
  REQUIRE(w.success);
  REQUIRE(be.models.size() == 4);
  CHECK(be.options[0].relaxAll);
  for (std::size_t i = 1; i < 4; ++i) CHECK_FALSE(be.options[i].relaxAll);
  auto expected = replayStages(m, be.results, cfg.epsilon);
  REQUIRE(expected.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CAPTURE(i);
    CHECK(be.models[i].variables() == expected[i].variables());
    CHECK(be.models[i].constraints() == expected[i].constraints());
  }
  CHECK(w.stageLog[0].stage == "relaxation");
  CHECK(w.stageLog[1].stage == "extras");
  CHECK(w.stageLog[2].stage == "group1");
  CHECK(w.stageLog[3].stage == "group2");
  CHECK(w.lpBound == doctest::Approx(be.results[0].objective));

  // extra trains the relaxation switched off stay off
  for (int s : m.registry.columnsOf(VarKind::ExtraService))
    if (be.results[0].values[s] < cfg.epsilon) CHECK(w.assignment[s] == 0.0);
}

TEST_CASE("three solves without extra candidates") {
  Instance in = applyFleetScenario(generateDeskInstance({}, 3), 2);
  Prepared p = prepare(in);
  RecordingBackend be;
  WarmStartOutcome w = computeWarmStart(buildSsndRm(p.inst, p.cat, p.net), warmStartConfigFor(p.inst.config), be);
  CHECK(w.success);
  CHECK(be.models.size() == 3);
  CHECK(w.backendSolves() == 3);
}

TEST_CASE("integral relaxation passes straight through") {
  Instance in = shuttle();
  in.demands.push_back(demand("d", 0, 1, 50, 1000, 2));
  in.railcars = {car("1x53")};
  Prepared p = prepare(in);
  BuiltModel m = buildUnrestrictedLoading(p.inst, p.cat, p.net);
  RecordingBackend be;
  WarmStartOutcome w = computeWarmStart(m, exactConfig(), be);
  REQUIRE(w.success);
  CHECK(w.objective == doctest::Approx(w.lpBound));
  for (const StageRecord& s : w.stageLog) CHECK(s.fixedToValue == 0);
  for (std::size_t j = 0; j < w.assignment.size(); ++j)
    if (be.results[0].values[j] < 1e-5) CHECK(w.assignment[j] == 0.0);
}

TEST_CASE("warm start brackets the optimum on tiny instances") {
  auto be = milp::makeBackend();
  int seen = 0;
  for (std::uint64_t seed = 1; seen < 20; ++seed) {
    Prepared p = prepare(tinyInstance(seed));
    if (p.cat.blocks.size() > 12) continue;
    ++seen;
    BuiltModel m = buildSsndRm(p.inst, p.cat, p.net);
    WarmStartOutcome w;
    milp::SolveResult r = solveWithWarmStart(m, exactConfig(), *be, &w);
    double opt = oracle::bruteForceOptimum(p.inst, p.cat).objective.toDouble();
    REQUIRE(r.hasSolution());
    if (w.success) CHECK(w.objective >= opt - 1e-6 * std::max(1.0, opt));
    if (w.success) CHECK(r.objective <= w.objective + 1e-9);
    CHECK(r.objective == doctest::Approx(opt).epsilon(1e-6));
  }
}

TEST_CASE("injected faults fall back to a cold solve") {
  Prepared p = deskWithExtras(1);
  BuiltModel m = buildSsndRm(p.inst, p.cat, p.net);
  for (int call : {1, 2, 3, 4}) {
    for (bool throws : {false, true}) {
      CAPTURE(call);
      RecordingBackend be;
      be.failOnCall = call;
      be.throwOnFail = throws;
      WarmStartOutcome w;
      milp::SolveResult r = solveWithWarmStart(m, warmStartConfigFor(p.inst.config), be, &w);
      CHECK_FALSE(w.success);
      CHECK(w.backendSolves() == call);
      CHECK(be.models.size() == static_cast<std::size_t>(call) + 1);
      CHECK_FALSE(be.options.back().warmStart.has_value());
      CHECK(r.hasSolution());
      CHECK(r.message.find("warm start failed") != std::string::npos);
      CHECK(stageLogJson(w, false).find("\"success\": false") != std::string::npos);
    }
  }
}

TEST_CASE("final solve starts from the warm start and is never worse") {
  Prepared p = deskWithExtras(3);
  BuiltModel m = buildSsndRm(p.inst, p.cat, p.net);
  RecordingBackend be;
  WarmStartOutcome w;
  milp::SolveResult r = solveWithWarmStart(m, warmStartConfigFor(p.inst.config), be, &w);
  REQUIRE(w.success);
  REQUIRE(be.options.size() == 5);
  REQUIRE(be.options.back().warmStart.has_value());
  CHECK(*be.options.back().warmStart == w.assignment);
  CHECK(r.objective <= w.objective + 1e-9);
  CHECK(r.gap <= 0.025 + 1e-9);
  CHECK(m.model.maxViolation(w.assignment) <= 1e-6);
  CHECK(m.model.maxIntegralityError(w.assignment) == 0.0);
}

TEST_CASE("stage log without timing is reproducible") {
  Prepared p = deskWithExtras(4);
  BuiltModel m = buildSsndRm(p.inst, p.cat, p.net);
  auto be = milp::makeBackend();
  std::string a = stageLogJson(computeWarmStart(m, warmStartConfigFor(p.inst.config), *be), false);
  std::string b = stageLogJson(computeWarmStart(m, warmStartConfigFor(p.inst.config), *be), false);
  CHECK(a == b);
  CHECK(a.find("\"time\"") == std::string::npos);
}
