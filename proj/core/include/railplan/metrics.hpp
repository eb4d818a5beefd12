#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "railplan/audit.hpp"
#include "railplan/generator.hpp"

namespace railplan {

inline constexpr const char* kToolVersion = "0.1.0";

struct BlockScatterRow {
  int block = -1;
  double ratio40Platforms = 0.0;
  double ratio40Containers = 0.0;
  double slotUtilization = 0.0;
};

struct MetricsReport {
  Formulation formulation = Formulation::SsndRm;
  double unsatisfiedDemandPct = 0.0;
  double capacityUsage = 0.0;  // percent of train length-distance on running services
  double usageDiffVsReference = 0.0;
  std::optional<double> slotUtilizationPct;        // empties count as available slots
  std::optional<double> slotUtilizationLoadedPct;  // loaded cars only
  int extraTrainCount = 0;
  long long platformCount = 0;
  long long railcarCount = 0;  // fleet size for SSND-RM, car-block assignments otherwise
  double pct53Platforms = 0.0;
  double pct1PlatformShare = 0.0;
  double pct3PlatformShare = 0.0;
  double pct5PlatformShare = 0.0;
  std::vector<BlockScatterRow> perBlockScatter;
  std::vector<AsymmetryEntry> demandAsymmetry;

  std::string toJson() const;
};

MetricsReport computeMetrics(const PlanSolution& sol, const BuiltModel& built, const Instance& inst,
                             const BlockCatalog& cat, const TimeSpaceNetwork& net);

struct ModelRun {
  PlanSolution solution;
  MetricsReport metrics;
};

struct ComparisonRow {
  Formulation formulation = Formulation::SsndRm;
  double objective = 0.0;
  double time = 0.0;
  double unsatisfiedDemandPct = 0.0;
  double capacityUsage = 0.0;
  double usageDiffPct = 0.0;  // (reference - model) / reference
};

// Reference is the SSND-RM run when present, otherwise the first run.
// Throws std::invalid_argument on mismatched instance fingerprints.
std::vector<ComparisonRow> compareModels(const std::vector<ModelRun>& runs);

struct BatchRecord {
  std::string instance;
  std::string instanceSha256;
  std::uint64_t seed = 0;
  std::string scenario;
  bool extras = false;
  bool warmStart = false;
  std::string status;
  ModelRun run;
  double containers40Pct = 0.0;
};

// runs.csv, model_comparison.csv, fleet_composition.csv, demand_profile.json, block_composition.json,
// manifest.json. Throws std::runtime_error naming the path on I/O failure.
void exportReports(const std::vector<BatchRecord>& batch, const std::filesystem::path& outDir,
                   const std::string& configJson = "{}");

}  // namespace railplan
