#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "railplan/instance.hpp"

namespace railplan {

struct FleetScenario {
  int id = 0;
  std::string label;  // "1x53", "1x40,1x53", ... "All"
  std::vector<std::string> railcarTypeIds;
};

const std::vector<FleetScenario>& fleetScenarios();
const FleetScenario& fleetScenario(int id);  // throws std::out_of_range outside 1..7

// The six car types of the experiments: 1x40 1x53 3x40 3x53 5x40 5x53.
std::vector<RailcarType> standardRailcars();

struct OdTotal {
  int origin = -1;
  int destination = -1;
  int volume = 0;
  Money outsourcingCost = Money::fromDouble(100000);
};

struct GeneratorSpec {
  std::uint64_t seed = 1;
  std::vector<OdTotal> odTotals;
  double share40Min = 0.0;  // 40-ft share ~ U[share40Min, share40Max]
  double share40Max = 1.0;
  double dueSlackFactor = 1.5;  // due = release + sp + factor * sp
};

struct GeneratedDemands {
  std::vector<Demand> demands;
  std::vector<std::string> warnings;
};

// Round-half-down on the 40-ft side; the remainder goes to 53-ft.
int split40(int volume, double share40);

GeneratedDemands generateDemands(const Instance& base, const GeneratorSpec& spec);

Instance applyFleetScenario(const Instance& inst, int scenarioId);
Instance duplicateAsExtras(const Instance& inst);
Instance withoutExtras(const Instance& inst);

struct SizeParams {
  int terminals = 5;
  int services = 6;
  int legsPerService = 2;
  int capacityMin = 1500;  // feet
  int capacityMax = 3000;
  int distanceMin = 150;   // km
  int distanceMax = 600;
  int regions = 2;
  Minutes transferTime = 120;
};

// Schedule only: terminals, services, the six car types and default costs; no demands.
Instance generateSyntheticNetwork(const SizeParams& size, std::uint64_t seed);

struct DeskParams {
  SizeParams size;
  int odPairs = 10;
  int volumeMin = 8;
  int volumeMax = 20;
  double share40Min = 0.15;
  double share40Max = 0.85;
  double dueSlackFactor = 1.5;
};

// Synthetic network plus demands on reachable OD pairs.
Instance generateDeskInstance(const DeskParams& p, std::uint64_t seed, std::vector<std::string>* warnings = nullptr);

// Volume asymmetry per unordered terminal pair, in percent: |v_ij - v_ji| / max(v_ij, v_ji) * 100.
struct AsymmetryEntry {
  int a = -1;
  int b = -1;
  int forward = 0;
  int backward = 0;
  double percent = 0.0;
};
std::vector<AsymmetryEntry> demandAsymmetry(const Instance& inst);

struct ManifestEntry {
  std::string file;
  std::uint64_t seed = 0;
  std::string spec;  // generator parameters as JSON
  std::string sha256;
};
std::string manifestJson(const std::vector<ManifestEntry>& entries);

}  // namespace railplan
