#include "railplan/warmstart.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace railplan {

using milp::SolveResult;
using milp::SolveStatus;
using milp::VarKind;

std::vector<KindGroup> defaultGroupOrder() {
  return {{VarKind::BlockSelect, VarKind::LoadedCars},
          {VarKind::EmptyCars, VarKind::Allocation, VarKind::PoolInventory}};
}

VariablePartition partitionVariables(const milp::VariableRegistry& reg, const std::vector<KindGroup>& order) {
  const std::set<VarKind> tail{VarKind::BlockFlow, VarKind::Unmet, VarKind::SinglePlatform, VarKind::PairPlatform};
  std::set<VarKind> seen{VarKind::ExtraService};
  seen.insert(tail.begin(), tail.end());
  VariablePartition p;
  p.extraGroup = reg.columnsOf(VarKind::ExtraService);
  for (const KindGroup& g : order) {
    if (g.empty()) throw std::invalid_argument("empty variable group in warm-start order");
    std::vector<int> cols;
    for (VarKind k : g) {
      if (!seen.insert(k).second)
        throw std::invalid_argument(std::string("variable kind ") + toString(k) + " appears twice in the partition");
      auto c = reg.columnsOf(k);
      cols.insert(cols.end(), c.begin(), c.end());
    }
    p.orderedGroups.push_back(std::move(cols));
  }
  for (VarKind k : tail) {
    auto c = reg.columnsOf(k);
    p.tailGroup.insert(p.tailGroup.end(), c.begin(), c.end());
  }
  if (seen.size() != static_cast<std::size_t>(milp::kVarKindCount))
    throw std::invalid_argument("warm-start groups do not cover every variable kind");
  return p;
}

WarmStartConfig warmStartConfigFor(const PlanningConfig& pc) {
  WarmStartConfig c;
  c.epsilon = pc.warmStartEpsilon;
  c.gapTarget = pc.mipGapTarget;
  c.timeLimit = pc.timeLimit;
  c.threads = pc.solverThreads;
  return c;
}

namespace {

double seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

class Pipeline {
 public:
  Pipeline(const BuiltModel& built, const WarmStartConfig& cfg, milp::SolverBackend& backend)
      : built_(built), cfg_(cfg), backend_(backend), base_(milp::relaxAll(built.model)) {}

  WarmStartOutcome run() {
    auto start = std::chrono::steady_clock::now();
    WarmStartOutcome out;
    VariablePartition part = partitionVariables(built_.registry, cfg_.groupOrder);

    if (!stage(out, "relaxation", true)) return finish(out, start);
    out.lpBound = prev_.objective;

    if (!part.extraGroup.empty()) {
      fixBelowEpsilon(part.extraGroup);
      integralize(part.extraGroup);
      if (!stage(out, "extras", false)) return finish(out, start);
    }
    for (int s : part.extraGroup)
      if (!fixed_.count(s)) {
        fixed_[s] = std::round(prev_.values[s]);
        ++pendingValue_;
      }

    for (std::size_t g = 0; g < part.orderedGroups.size(); ++g) {
      fixBelowEpsilon(part.orderedGroups[g]);
      integralize(part.orderedGroups[g]);
      if (g + 1 == part.orderedGroups.size()) integralize(part.tailGroup);
      if (!stage(out, "group" + std::to_string(g + 1), false)) return finish(out, start);
    }

    std::vector<double> x = prev_.values;
    for (int j = 0; j < built_.model.numVariables(); ++j)
      if (built_.model.variable(j).integer) x[j] = std::round(x[j]);
    double viol = built_.model.maxViolation(x);
    if (viol > 1e-6) {
      out.failedStage = out.stageLog.back().stage;
      out.message = "warm start violates the full model by " + std::to_string(viol);
      return finish(out, start);
    }
    out.assignment = std::move(x);
    out.objective = built_.model.objectiveValue(out.assignment);
    out.success = true;
    return finish(out, start);
  }

 private:
  const BuiltModel& built_;
  const WarmStartConfig& cfg_;
  milp::SolverBackend& backend_;
  milp::ModelSpec base_;
  std::map<int, double> fixed_;
  std::set<int> integral_;
  SolveResult prev_;
  int pendingZero_ = 0;
  int pendingValue_ = 0;

  void fixBelowEpsilon(const std::vector<int>& cols) {
    for (int j : cols)
      if (!fixed_.count(j) && prev_.values[j] < cfg_.epsilon) {
        fixed_[j] = 0.0;
        ++pendingZero_;
      }
  }
  void integralize(const std::vector<int>& cols) {
    for (int j : cols)
      if (!fixed_.count(j)) integral_.insert(j);
  }

  milp::ModelSpec stageModel() const {
    std::vector<int> ints(integral_.begin(), integral_.end());
    std::vector<std::pair<int, double>> fix(fixed_.begin(), fixed_.end());
    return milp::fixVariables(milp::setIntegrality(base_, ints, true), fix);
  }

  bool stage(WarmStartOutcome& out, std::string name, bool relax) {
    milp::SolverOptions opt;
    opt.relaxAll = relax;
    opt.gapTarget = cfg_.gapTarget;
    opt.timeLimit = std::isfinite(cfg_.timeLimit) ? cfg_.timeLimit / 4.0 : milp::kInf;
    opt.threads = cfg_.threads;
    opt.randomSeed = cfg_.randomSeed;
    opt.verbose = cfg_.verbose;
    milp::ModelSpec m = stageModel();

    StageRecord rec;
    rec.stage = std::move(name);
    rec.fixedToZero = pendingZero_;
    rec.fixedToValue = pendingValue_;
    rec.fixedTotal = static_cast<int>(fixed_.size());
    rec.integralized = 0;
    for (int j : integral_)
      if (!fixed_.count(j)) ++rec.integralized;
    pendingZero_ = pendingValue_ = 0;

    SolveResult r;
    try {
      r = backend_.solve(m, opt);
    } catch (const std::exception& e) {
      r.status = SolveStatus::Error;
      r.message = e.what();
    }
    rec.status = r.status;
    rec.objective = r.objective;
    rec.time = r.wallTime;
    rec.message = r.message;
    bool ok = r.hasSolution() && r.values.size() == static_cast<std::size_t>(m.numVariables());
    if (ok) prev_ = std::move(r);
    else {
      out.failedStage = rec.stage;
      out.message = rec.stage + " stage returned " + toString(r.status) + (r.message.empty() ? "" : ": " + r.message);
    }
    out.stageLog.push_back(std::move(rec));
    return ok;
  }

  static WarmStartOutcome& finish(WarmStartOutcome& out, std::chrono::steady_clock::time_point start) {
    out.time = seconds(start);
    return out;
  }
};

}  // namespace

WarmStartOutcome computeWarmStart(const BuiltModel& built, const WarmStartConfig& config,
                                  milp::SolverBackend& backend) {
  return Pipeline(built, config, backend).run();
}

SolveResult solveWithWarmStart(const BuiltModel& built, const WarmStartConfig& config, milp::SolverBackend& backend,
                               WarmStartOutcome* outcome) {
  auto start = std::chrono::steady_clock::now();
  WarmStartOutcome ws = computeWarmStart(built, config, backend);

  milp::SolverOptions opt;
  opt.gapTarget = config.gapTarget;
  opt.threads = config.threads;
  opt.randomSeed = config.randomSeed;
  opt.verbose = config.verbose;
  opt.timeLimit = config.timeLimit;
  if (std::isfinite(config.timeLimit)) opt.timeLimit = std::max(1.0, config.timeLimit - ws.time);
  if (ws.success) opt.warmStart = ws.assignment;

  SolveResult r = backend.solve(built.model, opt);
  if (!ws.success) {
    std::string warn = "warm start failed at " + ws.failedStage + "; cold solve";
    r.message = r.message.empty() ? warn : warn + "; " + r.message;
  } else if (!r.hasSolution() || r.objective > ws.objective) {
    // never hand back anything worse than the incumbent we injected
    r.status = SolveStatus::FeasibleAtLimit;
    r.values = ws.assignment;
    r.objective = ws.objective;
    r.gap = std::isfinite(r.bound) && std::abs(ws.objective) > 0
                ? std::max(0.0, (ws.objective - r.bound) / std::abs(ws.objective))
                : milp::kInf;
    r.warmStartUsed = true;
  }
  r.wallTime = seconds(start);
  if (outcome) *outcome = std::move(ws);
  return r;
}

std::string stageLogJson(const WarmStartOutcome& w, bool withTiming) {
  nlohmann::ordered_json o;
  o["success"] = w.success;
  if (!w.failedStage.empty()) o["failedStage"] = w.failedStage;
  if (!w.message.empty()) o["message"] = w.message;
  o["objective"] = w.success ? nlohmann::ordered_json(w.objective) : nlohmann::ordered_json(nullptr);
  o["lpBound"] = std::isfinite(w.lpBound) ? nlohmann::ordered_json(w.lpBound) : nlohmann::ordered_json(nullptr);
  if (withTiming) o["time"] = w.time;
  auto& stages = o["stages"] = nlohmann::ordered_json::array();
  for (const StageRecord& s : w.stageLog) {
    nlohmann::ordered_json r;
    r["stage"] = s.stage;
    r["status"] = toString(s.status);
    r["objective"] = std::isfinite(s.objective) ? nlohmann::ordered_json(s.objective) : nlohmann::ordered_json(nullptr);
    r["fixedToZero"] = s.fixedToZero;
    r["fixedToValue"] = s.fixedToValue;
    r["integralized"] = s.integralized;
    r["fixedTotal"] = s.fixedTotal;
    if (withTiming) r["time"] = s.time;
    if (!s.message.empty() && withTiming) r["message"] = s.message;
    stages.push_back(std::move(r));
  }
  return o.dump(2) + "\n";
}

}  // namespace railplan
