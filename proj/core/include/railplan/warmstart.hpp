#pragma once

#include <string>
#include <vector>

#include "railplan/formulations.hpp"
#include "railplan/milp.hpp"

namespace railplan {

struct VariablePartition {
  std::vector<int> extraGroup;                // s
  std::vector<std::vector<int>> orderedGroups;  // R
  std::vector<int> tailGroup;                 // S
};

using KindGroup = std::vector<milp::VarKind>;

// {y, x} then {w_b, w_theta, w_theta_i}.
std::vector<KindGroup> defaultGroupOrder();

// Throws std::invalid_argument when the groups overlap or miss a kind.
VariablePartition partitionVariables(const milp::VariableRegistry& reg,
                                     const std::vector<KindGroup>& order = defaultGroupOrder());

struct StageRecord {
  std::string stage;  // "relaxation", "extras", "group1", ...
  milp::SolveStatus status = milp::SolveStatus::Error;
  double objective = milp::kInf;
  double time = 0.0;
  int fixedToZero = 0;     // new in this stage
  int fixedToValue = 0;    // new in this stage
  int integralized = 0;    // integer columns in the stage model
  int fixedTotal = 0;      // cumulative after this stage
  std::string message;
};

struct WarmStartOutcome {
  std::vector<double> assignment;
  double objective = milp::kInf;
  double lpBound = -milp::kInf;
  double time = 0.0;
  std::vector<StageRecord> stageLog;
  bool success = false;
  std::string failedStage;
  std::string message;

  int backendSolves() const { return static_cast<int>(stageLog.size()); }
};

struct WarmStartConfig {
  double epsilon = 1e-5;
  double gapTarget = 0.025;
  double timeLimit = milp::kInf;  // overall; each stage gets a quarter
  int threads = 1;
  int randomSeed = 0;
  bool verbose = false;
  std::vector<KindGroup> groupOrder = defaultGroupOrder();
};

WarmStartConfig warmStartConfigFor(const PlanningConfig& pc);

WarmStartOutcome computeWarmStart(const BuiltModel& built, const WarmStartConfig& config,
                                  milp::SolverBackend& backend);

// Warm start then the full solve from that incumbent; cold solve when the warm start fails.
milp::SolveResult solveWithWarmStart(const BuiltModel& built, const WarmStartConfig& config,
                                     milp::SolverBackend& backend, WarmStartOutcome* outcome = nullptr);

// One record per stage. Timing fields are left out when withTiming is false.
std::string stageLogJson(const WarmStartOutcome& w, bool withTiming = true);

}  // namespace railplan
