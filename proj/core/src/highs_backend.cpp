#include "highs_backend.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wunused-parameter"
#include "Highs.h"
#pragma GCC diagnostic pop

namespace railplan::milp {

namespace {

double clampInf(double v) {
  if (v >= kHighsInf) return kInf;
  if (v <= -kHighsInf) return -kInf;
  return v;
}

double toHighs(double v) {
  if (v == kInf) return kHighsInf;
  if (v == -kInf) return -kHighsInf;
  return v;
}

HighsLp toLp(const ModelSpec& m, bool relax) {
  HighsLp lp;
  lp.num_col_ = m.numVariables();
  lp.num_row_ = m.numConstraints();
  lp.model_name_ = m.name;
  bool anyInt = false;
  for (const auto& v : m.variables()) {
    lp.col_cost_.push_back(v.objective);
    lp.col_lower_.push_back(toHighs(v.lower));
    lp.col_upper_.push_back(toHighs(v.upper));
    anyInt = anyInt || (v.integer && !relax);
  }
  if (anyInt)
    for (const auto& v : m.variables())
      lp.integrality_.push_back(v.integer ? HighsVarType::kInteger : HighsVarType::kContinuous);

  HighsSparseMatrix& a = lp.a_matrix_;
  a.format_ = MatrixFormat::kRowwise;
  a.num_col_ = lp.num_col_;
  a.num_row_ = lp.num_row_;
  a.start_.assign(1, 0);
  std::map<int, double> merged;
  for (const auto& r : m.constraints()) {
    merged.clear();
    for (const Term& t : r.terms) merged[t.var] += t.coef;
    for (auto [j, c] : merged)
      if (c != 0.0) {
        a.index_.push_back(j);
        a.value_.push_back(c);
      }
    a.start_.push_back(static_cast<HighsInt>(a.index_.size()));
    lp.row_lower_.push_back(r.sense == Sense::LessEqual ? -kHighsInf : r.rhs);
    lp.row_upper_.push_back(r.sense == Sense::GreaterEqual ? kHighsInf : r.rhs);
  }
  return lp;
}

struct Timeline {
  std::vector<BoundSample> samples;
};

class HighsBackend final : public SolverBackend {
 public:
  std::string name() const override { return "highs"; }
  // The bundled solver shares a process-wide task scheduler.
  bool reentrant() const override { return false; }

  SolveResult solve(const ModelSpec& model, const SolverOptions& opt) override {
    auto t0 = std::chrono::steady_clock::now();
    SolveResult res;
    try {
      model.validate();
    } catch (const std::exception& e) {
      res.status = SolveStatus::Error;
      res.message = e.what();
      return res;
    }
    const bool mip = !opt.relaxAll && model.hasIntegers();
    Highs h;
    h.setOptionValue("output_flag", opt.verbose);
    h.setOptionValue("threads", std::max(1, opt.threads));
    h.setOptionValue("random_seed", opt.randomSeed);
    h.setOptionValue("mip_rel_gap", std::max(0.0, opt.gapTarget));
    h.setOptionValue("mip_feasibility_tolerance", opt.integralityTolerance);
    h.setOptionValue("primal_feasibility_tolerance", opt.feasibilityTolerance);
    if (std::isfinite(opt.timeLimit)) h.setOptionValue("time_limit", std::max(0.01, opt.timeLimit));

    if (h.passModel(toLp(model, opt.relaxAll)) == HighsStatus::kError) {
      res.status = SolveStatus::Error;
      res.message = "solver rejected the model";
      return res;
    }

    std::optional<double> warmObj;
    if (opt.warmStart && mip && opt.warmStart->size() == static_cast<std::size_t>(model.numVariables())) {
      const auto& ws = *opt.warmStart;
      if (model.maxViolation(ws) <= 1e-6 && model.maxIntegralityError(ws) <= opt.integralityTolerance) {
        warmObj = model.objectiveValue(ws);
        HighsSolution sol;
        sol.col_value = ws;
        sol.value_valid = true;
        h.setSolution(sol);
      }
    }

    Timeline tl;
    if (mip) {
      h.setCallback(
          [](int type, const std::string&, const HighsCallbackOutput* out, HighsCallbackInput*, void* data) {
            if (type != kCallbackMipImprovingSolution || !out) return;
            auto* t = static_cast<Timeline*>(data);
            t->samples.push_back({out->running_time, clampInf(out->mip_primal_bound), clampInf(out->mip_dual_bound)});
          },
          &tl);
      h.startCallback(kCallbackMipImprovingSolution);
    }

    HighsStatus run = h.run();
    HighsModelStatus ms = h.getModelStatus();
    const HighsInfo& info = h.getInfo();
    bool haveSol = info.primal_solution_status == kSolutionStatusFeasible;

    switch (ms) {
      case HighsModelStatus::kOptimal: res.status = SolveStatus::Optimal; break;
      case HighsModelStatus::kInfeasible: res.status = SolveStatus::Infeasible; break;
      case HighsModelStatus::kUnbounded:
      case HighsModelStatus::kUnboundedOrInfeasible: res.status = SolveStatus::Unbounded; break;
      case HighsModelStatus::kTimeLimit:
      case HighsModelStatus::kIterationLimit:
      case HighsModelStatus::kSolutionLimit:
      case HighsModelStatus::kInterrupt:
        res.status = haveSol ? SolveStatus::FeasibleAtLimit : SolveStatus::Error;
        if (!haveSol) res.message = "limit reached without a feasible solution";
        break;
      default:
        res.status = SolveStatus::Error;
        res.message = "solver status: " + h.modelStatusToString(ms);
    }
    if (run == HighsStatus::kError && res.status != SolveStatus::Infeasible) {
      res.status = SolveStatus::Error;
      if (res.message.empty()) res.message = "solver run failed";
    }

    if (res.hasSolution()) {
      res.values = h.getSolution().col_value;
      res.objective = model.objectiveValue(res.values);
      if (mip) {
        res.bound = clampInf(info.mip_dual_bound);
        res.gap = clampInf(info.mip_gap);
      } else {
        res.bound = res.objective;
        res.gap = 0.0;
      }
    }
    // Never return something worse than a feasible incumbent we were handed.
    if (warmObj && (!res.hasSolution() || res.objective > *warmObj + 1e-9 * std::max(1.0, std::abs(*warmObj)))) {
      if (res.status != SolveStatus::Optimal) res.status = SolveStatus::FeasibleAtLimit;
      res.values = *opt.warmStart;
      res.objective = *warmObj;
      res.message.clear();
      if (std::isfinite(res.bound)) res.gap = std::abs(res.objective - res.bound) / std::max(1e-9, std::abs(res.objective));
    }
    if (warmObj) res.warmStartUsed = true;
    if (res.status == SolveStatus::Optimal && mip && !std::isfinite(res.gap)) res.gap = 0.0;
    res.timeline = std::move(tl.samples);
    res.wallTime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }
};

}  // namespace

std::unique_ptr<SolverBackend> makeHighsBackend() { return std::make_unique<HighsBackend>(); }

}  // namespace railplan::milp
