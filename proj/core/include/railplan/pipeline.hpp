#pragma once

#include <optional>

#include "railplan/audit.hpp"
#include "railplan/blocks.hpp"
#include "railplan/formulations.hpp"
#include "railplan/metrics.hpp"
#include "railplan/network.hpp"
#include "railplan/warmstart.hpp"

namespace railplan {

struct Prepared {
  Instance inst;
  TimeSpaceNetwork net;
  BlockCatalog cat;
};

Prepared prepare(Instance inst, const BlockLimits& limits = {});

struct RunOptions {
  bool warmStart = true;
  WarmStartConfig warm;  // gap, limits and threads also drive the final solve
};

RunOptions runOptionsFor(const Instance& inst);

struct RunOutcome {
  BuiltModel built;
  milp::SolveResult result;
  std::optional<WarmStartOutcome> warm;
  PlanSolution plan;
  AuditReport audit;
  MetricsReport metrics;

  bool solved() const { return result.hasSolution(); }
};

// Build, solve (optionally from a warm start), audit and measure one formulation.
RunOutcome runFormulation(const Prepared& p, Formulation f, const RunOptions& opt, milp::SolverBackend& backend);

// Solution file: formulation, fingerprints, status, objective, timings and nonzero values by column name.
std::string solutionJson(const RunOutcome& r);
struct SolutionHeader {
  Formulation formulation = Formulation::SsndRm;
  std::string instanceFingerprint;
  std::string catalogFingerprint;
};
SolutionHeader readSolutionHeader(std::string_view json);
// Unknown column names are an error; absent columns read as zero.
PlanSolution readSolution(std::string_view json, const BuiltModel& built);

}  // namespace railplan
