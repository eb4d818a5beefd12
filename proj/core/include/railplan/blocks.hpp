#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "railplan/instance.hpp"
#include "railplan/network.hpp"

namespace railplan {

struct LegRef {
  int service = -1;
  int leg = -1;
  auto operator<=>(const LegRef&) const = default;
};

struct BlockPath {
  int id = -1;
  int origin = -1;
  int destination = -1;
  Minutes departure = 0;  // alpha_b
  Minutes arrival = 0;    // beta_b
  std::vector<LegRef> legs;
  std::vector<int> transferTerminals;
  int capacity = 0;  // feet
  int transfers = 0;
  int borderCrossings = 0;
  int distance = 0;  // km
  Minutes transferWait = 0;
  Minutes duration = 0;  // cyclic departure-to-arrival
  bool wraps = false;    // alpha_b > beta_b on the raw clock
  Money buildCost;
  bool usesExtraService = false;
};

struct BlockLimits {
  int maxTransfers = 3;
  std::optional<Minutes> maxElapsed;  // defaults to T
  bool demandPairsOnly = false;
};

struct CompatibleBlock {
  int block = -1;
  Minutes wait = 0;      // cyclic wait between release and block departure
  Minutes lateness = 0;  // t_late_bk
};

struct BlockCatalog {
  std::vector<BlockPath> blocks;
  std::vector<std::vector<CompatibleBlock>> demandBlocks;  // B_k
  std::vector<std::vector<int>> blockDemands;              // K_b
  std::vector<std::vector<int>> arcBlocks;                 // B_a, indexed by arc id
  std::vector<std::vector<int>> poolDepartures;            // B+ at pool node, indexed by node id
  std::vector<std::vector<int>> poolArrivals;              // B- at pool node, indexed by node id
  std::vector<std::vector<int>> formedAt;                  // B+_theta
  std::vector<std::vector<int>> wrapFormedAt;              // B+_theta with alpha_b > beta_b
  std::vector<int> departureNode;                          // TOUT of the first leg
  std::vector<int> arrivalNode;                            // TIN of the last leg
  std::vector<std::string> warnings;

  std::size_t size() const { return blocks.size(); }
  // One JSON object per line.
  std::string toJsonLines(const Instance& inst) const;
};

// Fills capacity, transfers, borders, distance, waits, times and cost from the leg sequence.
BlockPath computeAttributes(BlockPath block, const Instance& inst);

// Leg sequence check against adjacency and the transfer rule; empty string when valid.
std::string checkLegSequence(const std::vector<LegRef>& legs, const Instance& inst);

std::pair<std::vector<std::vector<CompatibleBlock>>, std::vector<std::vector<int>>> demandCompatibility(
    const std::vector<BlockPath>& blocks, const std::vector<Demand>& demands, const TimeSpaceNetwork& net);

Minutes lateness(const BlockPath& block, const Demand& demand, const TimeSpaceNetwork& net);

BlockCatalog generateBlocks(const Instance& inst, const TimeSpaceNetwork& net, const BlockLimits& limits = {});

}  // namespace railplan
