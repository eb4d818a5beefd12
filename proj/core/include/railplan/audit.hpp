#pragma once

#include <string>
#include <vector>

#include "railplan/blocks.hpp"
#include "railplan/formulations.hpp"
#include "railplan/instance.hpp"
#include "railplan/network.hpp"

namespace railplan {

struct PlanSolution {
  Formulation formulation = Formulation::SsndRm;
  std::vector<double> values;  // by registry column
  double objective = 0.0;
  double gap = 0.0;
  double warmStartTime = 0.0;
  double totalTime = 0.0;
  double rootGap = 0.0;
  std::string instanceFingerprint;
};

PlanSolution makePlanSolution(const BuiltModel& built, const milp::SolveResult& r);

inline constexpr double kAuditTolerance = 1e-6;

struct AuditViolation {
  std::string family;  // row family tag, or "integrality", "bounds", "objective", "inventory"
  std::string row;
  double magnitude = 0.0;
  std::string message;
};

struct InventoryTrace {
  int railcar = -1;
  int terminal = -1;
  long long start = 0;   // inventory entering the cycle
  long long minimum = 0;
  long long end = 0;
  std::vector<long long> levels;  // after each pool event
};

struct AuditReport {
  std::vector<AuditViolation> violations;
  std::vector<InventoryTrace> inventory;
  std::vector<long long> fleetTotals;  // sum over terminals of w_theta, per railcar type
  double objective = 0.0;              // recomputed from the cost parameters

  bool ok() const { return violations.empty(); }
  std::string toJson() const;
};

// Re-evaluates every family from instance and block data. The model rows are not consulted.
AuditReport auditSolution(const PlanSolution& sol, const BuiltModel& built, const Instance& inst,
                          const BlockCatalog& cat, const TimeSpaceNetwork& net);

}  // namespace railplan
