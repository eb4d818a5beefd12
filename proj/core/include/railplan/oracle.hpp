#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <vector>

#include "railplan/blocks.hpp"
#include "railplan/instance.hpp"

namespace railplan::oracle {

struct TinyBounds {
  int maxTerminals = 3;
  int maxServices = 3;
  int maxBlocks = 12;
  int maxTotalVolume = 6;
  int maxFleetPerType = 4;  // every car type needs a fleet limit at most this
  int maxExtras = 1;
};

struct Refused : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ContainerCounts {
  int n40 = 0;
  int n53 = 0;
  auto operator<=>(const ContainerCounts&) const = default;
};

// Physical slot assignment; any car may stay empty.
bool slotLoadingFeasible(ContainerCounts containers, const std::vector<RailcarType>& cars);
// Same, but every car must carry at least one container.
bool slotLoadingFeasibleAllUsed(ContainerCounts containers, const std::vector<RailcarType>& cars);
// (n40, n53) loads one car can hold, empty load included.
std::vector<ContainerCounts> carLoads(const RailcarType& car);

// Integer platform-pattern counts and x_gamma <= multiplicity satisfying the counting rows of one block.
bool countingFeasible(ContainerCounts containers, const std::vector<RailcarType>& cars);

struct Plan {
  std::vector<int> extras;                          // services switched on
  std::map<std::pair<int, int>, int> flow;          // (block, demand) -> containers
  std::vector<int> unmet;                           // per demand
  std::vector<std::vector<int>> loaded;             // [block][car type]
  std::vector<std::vector<int>> empty;              // [block][car type]
  std::vector<std::vector<long long>> allocation;   // [car type][terminal]
  std::vector<int> builtBlocks;
};

struct Result {
  Money objective;
  Plan plan;
  long long leavesVisited = 0;
};

// Exhaustive optimum of the fleet-constrained planning problem. Throws Refused above the bounds.
Result bruteForceOptimum(const Instance& inst, const BlockCatalog& cat, const TinyBounds& bounds = {});

}  // namespace railplan::oracle
