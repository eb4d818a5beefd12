#include "railplan/pipeline.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace railplan {

Prepared prepare(Instance inst, const BlockLimits& limits) {
  Prepared p{std::move(inst), {}, {}};
  p.net = buildNetwork(p.inst);
  p.cat = generateBlocks(p.inst, p.net, limits);
  return p;
}

RunOptions runOptionsFor(const Instance& inst) {
  RunOptions o;
  o.warm = warmStartConfigFor(inst.config);
  return o;
}

RunOutcome runFormulation(const Prepared& p, Formulation f, const RunOptions& opt, milp::SolverBackend& backend) {
  RunOutcome out{buildFormulation(f, p.inst, p.cat, p.net), {}, std::nullopt, {}, {}, {}};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double warmTime = 0.0, rootGap = nan;
  if (opt.warmStart) {
    WarmStartOutcome w;
    out.result = solveWithWarmStart(out.built, opt.warm, backend, &w);
    warmTime = w.time;
    if (w.success && std::isfinite(w.lpBound) && std::abs(w.objective) > 0)
      rootGap = std::max(0.0, (w.objective - w.lpBound) / std::abs(w.objective));
    out.warm = std::move(w);
  } else {
    milp::SolverOptions so;
    so.gapTarget = opt.warm.gapTarget;
    so.timeLimit = opt.warm.timeLimit;
    so.threads = opt.warm.threads;
    so.randomSeed = opt.warm.randomSeed;
    so.verbose = opt.warm.verbose;
    out.result = backend.solve(out.built.model, so);
  }
  out.plan = makePlanSolution(out.built, out.result);
  out.plan.warmStartTime = warmTime;
  out.plan.rootGap = rootGap;
  if (out.solved()) {
    out.audit = auditSolution(out.plan, out.built, p.inst, p.cat, p.net);
    out.metrics = computeMetrics(out.plan, out.built, p.inst, p.cat, p.net);
  }
  return out;
}

namespace {

nlohmann::ordered_json finiteOrNull(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string solutionJson(const RunOutcome& r) {
  nlohmann::ordered_json o;
  o["formulation"] = toString(r.built.formulation);
  o["instanceSha256"] = r.built.instanceFingerprint;
  o["catalogSha256"] = r.built.catalogFingerprint;
  o["status"] = milp::toString(r.result.status);
  o["objective"] = finiteOrNull(r.result.objective);
  o["bound"] = finiteOrNull(r.result.bound);
  o["gap"] = finiteOrNull(r.result.gap);
  o["warmStartTime"] = r.plan.warmStartTime;
  o["totalTime"] = r.plan.totalTime;
  o["rootGap"] = finiteOrNull(r.plan.rootGap);
  o["values"] = nlohmann::ordered_json::object();
  const auto& vars = r.built.model.variables();
  for (std::size_t j = 0; j < r.result.values.size() && j < vars.size(); ++j)
    if (std::abs(r.result.values[j]) > 1e-9) o["values"][vars[j].name] = r.result.values[j];
  return o.dump(2) + "\n";
}

SolutionHeader readSolutionHeader(std::string_view json) {
  auto o = nlohmann::json::parse(json);
  SolutionHeader h;
  h.formulation = parseFormulation(o.at("formulation").get<std::string>());
  h.instanceFingerprint = o.value("instanceSha256", "");
  h.catalogFingerprint = o.value("catalogSha256", "");
  return h;
}

PlanSolution readSolution(std::string_view json, const BuiltModel& built) {
  auto o = nlohmann::json::parse(json);
  PlanSolution s;
  s.formulation = parseFormulation(o.at("formulation").get<std::string>());
  if (s.formulation != built.formulation) throw std::invalid_argument("solution formulation does not match the model");
  s.instanceFingerprint = o.value("instanceSha256", "");
  s.values.assign(built.model.numVariables(), 0.0);
  for (const auto& [name, v] : o.at("values").items()) {
    int j = built.model.findVariable(name);
    if (j < 0) throw std::invalid_argument("solution names unknown variable '" + name + "'");
    s.values[j] = v.get<double>();
  }
  auto num = [&](const char* k) { return o.contains(k) && o[k].is_number() ? o[k].get<double>() : 0.0; };
  s.objective = num("objective");
  s.gap = num("gap");
  s.warmStartTime = num("warmStartTime");
  s.totalTime = num("totalTime");
  s.rootGap = num("rootGap");
  return s;
}

}  // namespace railplan
