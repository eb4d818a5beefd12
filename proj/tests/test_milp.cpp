#include <doctest.h>

#include <cmath>

#include "railplan/milp.hpp"

using namespace railplan::milp;

namespace {

ModelSpec knapsack() {
  ModelSpec m;
  int a = m.addVariable({"a", 0, 1, true, -5});
  int b = m.addVariable({"b", 0, 1, true, -4});
  int c = m.addVariable({"c", 0, 1, true, -3});
  m.addConstraint({"cap", "cap", {{a, 2}, {b, 3}, {c, 1}}, Sense::LessEqual, 4});
  return m;
}

SolverOptions exact() {
  SolverOptions o;
  o.gapTarget = 0;
  return o;
}

}  // namespace

TEST_CASE("integer lower bound") {
  ModelSpec m;
  int x = m.addVariable({"x", 0, kInf, true, 1});
  m.addConstraint({"r", "r", {{x, 1}}, Sense::GreaterEqual, 2.5});
  auto be = makeBackend("highs");
  SolveResult r = be->solve(m, exact());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(3));
  SolverOptions lp = exact();
  lp.relaxAll = true;
  CHECK(be->solve(m, lp).objective == doctest::Approx(2.5));
}

TEST_CASE("infeasible and unbounded") {
  auto be = makeBackend();
  ModelSpec m;
  int x = m.addVariable({"x", -kInf, kInf, false, 0});
  m.addConstraint({"lo", "r", {{x, 1}}, Sense::LessEqual, 0});
  m.addConstraint({"hi", "r", {{x, 1}}, Sense::GreaterEqual, 1});
  CHECK(be->solve(m, exact()).status == SolveStatus::Infeasible);
  CHECK_FALSE(be->solve(m, exact()).hasSolution());

  ModelSpec u;
  u.addVariable({"y", 0, kInf, false, -1});
  SolveStatus s = be->solve(u, exact()).status;
  CHECK((s == SolveStatus::Unbounded || s == SolveStatus::Infeasible));
}

TEST_CASE("relaxation bounds the integer optimum") {
  auto be = makeBackend();
  ModelSpec m = knapsack();
  SolveResult ip = be->solve(m, exact());
  SolveResult lp = be->solve(relaxAll(m), exact());
  CHECK(ip.objective == doctest::Approx(-8));
  CHECK(lp.objective <= ip.objective + 1e-9);
  CHECK(m.maxViolation(ip.values) <= 1e-9);
  CHECK(m.maxIntegralityError(ip.values) <= 1e-9);
}

TEST_CASE("persistent transforms") {
  ModelSpec m = knapsack();
  const ModelSpec copy = m;

  std::vector<std::pair<int, double>> fix{{0, 0.0}};
  ModelSpec f = fixVariables(m, fix);
  CHECK(f.variable(0).lower == 0);
  CHECK(f.variable(0).upper == 0);
  CHECK(m == copy);

  std::vector<std::pair<int, double>> one{{1, 1.0}};
  SolveResult r = makeBackend()->solve(fixVariables(m, one), exact());
  CHECK(r.values[1] == doctest::Approx(1));

  ModelSpec relaxed = relaxAll(m);
  for (const auto& v : relaxed.variables()) CHECK_FALSE(v.integer);
  std::vector<int> all{0, 1, 2};
  CHECK(setIntegrality(relaxed, all, true) == m);

  std::vector<int> only{2};
  ModelSpec partial = setIntegrality(relaxed, only, true);
  CHECK_FALSE(partial.variable(0).integer);
  CHECK_FALSE(partial.variable(1).integer);
  CHECK(partial.variable(2).integer);

  std::vector<std::pair<int, double>> bad{{7, 1.0}};
  CHECK_THROWS(fixVariables(m, bad));
}

TEST_CASE("validation of models") {
  ModelSpec m;
  m.addVariable({"x", 0, 1, false, 0});
  CHECK_THROWS(m.addVariable({"x", 0, 1, false, 0}));
  CHECK(m.findVariable("x") == 0);
  CHECK(m.findVariable("nope") == -1);
  m.addConstraint({"r", "f", {{3, 1.0}}, Sense::LessEqual, 1});
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("lp text round trip") {
  ModelSpec m = knapsack();
  m.addVariable({"free", -kInf, kInf, false, 0.5});
  m.addVariable({"z_b_k", 0, 7, true, 0});
  m.addConstraint({"eq", "eq", {{3, 1}, {4, -2}}, Sense::Equal, -1});
  std::string text = toLpFormat(m);
  ModelSpec back = parseLpFormat(text);
  CHECK(toLpFormat(back) == text);
  REQUIRE(back.numVariables() == m.numVariables());
  for (int j = 0; j < m.numVariables(); ++j) {
    CHECK(back.variable(j).name == m.variable(j).name);
    CHECK(back.variable(j).integer == m.variable(j).integer);
    CHECK(back.variable(j).objective == doctest::Approx(m.variable(j).objective));
  }
  auto be = makeBackend();
  CHECK(be->solve(back, exact()).objective == doctest::Approx(be->solve(m, exact()).objective));
}

TEST_CASE("warm start is accepted") {
  auto be = makeBackend();
  SolverOptions o = exact();
  o.warmStart = std::vector<double>{1, 0, 1};
  SolveResult r = be->solve(knapsack(), o);
  CHECK(r.objective == doctest::Approx(-8));
}

TEST_CASE("registry") {
  VariableRegistry reg;
  reg.add({VarKind::BlockSelect, {3, -1, -1, -1}}, 0);
  reg.add({VarKind::BlockFlow, {3, 1, -1, -1}}, 1);
  CHECK(reg.at({VarKind::BlockSelect, {3, -1, -1, -1}}) == 0);
  CHECK_FALSE(reg.find({VarKind::BlockSelect, {4, -1, -1, -1}}).has_value());
  CHECK_THROWS(reg.at({VarKind::Unmet, {0, -1, -1, -1}}));
  CHECK(reg.count(VarKind::BlockFlow) == 1);
  CHECK(reg.columnsOf(VarKind::BlockSelect) == std::vector<int>{0});
}

TEST_CASE("backend selection") {
  CHECK(makeBackend("highs")->name() == "highs");
  CHECK_FALSE(makeBackend("highs")->reentrant());
  CHECK_THROWS(makeBackend("nonexistent"));
}
