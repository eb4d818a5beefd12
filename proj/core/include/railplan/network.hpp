#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "railplan/instance.hpp"

namespace railplan {

enum class Layer { Train, Block, Car, Container };

enum class NodeKind { TIN, TOUT, BO, BD, BT, PoolPlus, PoolMinus, CO, CD, DIN, DOUT, CSink };

enum class ArcKind {
  TrainMoving,
  TrainHandling,
  ContainerWait,
  ContainerLoad,
  Pool2Pool,
  Pool2Load,
  Pool2Block,
  Car2Block,
  BlockBuild,
  BlockTransfer,
  BlockAttach,
  BlockDismantle,
  Empty2Pool,
  CarsDest,
  Unloaded2Pool,
  ContainerDest,
  ContainerSink,
  Artificial,
};

const char* toString(Layer l);
const char* toString(NodeKind k);
const char* toString(ArcKind k);

inline constexpr Minutes kUnreachable = std::numeric_limits<Minutes>::max();

struct EventNode {
  int id = -1;
  Layer layer = Layer::Train;
  NodeKind kind = NodeKind::TIN;
  int terminal = -1;
  std::optional<Minutes> time;  // empty for CSINK
  int service = -1;             // source service of the event
  int stop = -1;                // stop index on that service
};

struct NetworkArc {
  int id = -1;
  ArcKind kind = ArcKind::TrainMoving;
  int tail = -1;  // -1: sourceless entry of an artificial arc
  int head = -1;
  bool wraps = false;
  int capacity = 0;  // TrainMoving only
  int distance = 0;  // TrainMoving only
  int service = -1;
  int leg = -1;     // TrainMoving leg index, TrainHandling stop index
  int demand = -1;  // Artificial only
};

// Companion nodes created for one departure or arrival event.
struct EventGroup {
  int train = -1;  // TOUT or TIN
  int pool = -1;   // POOLMINUS or POOLPLUS
  int car = -1;    // CO or CD
  int block = -1;  // BO or BD
  int transfer = -1;   // BT (departures only)
  int container = -1;  // DIN or DOUT
};

struct TerminalEvents {
  std::vector<int> events;        // TIN/TOUT node ids in tie-rule order
  std::vector<int> poolSequence;  // POOLPLUS/POOLMINUS node ids, same order
  std::vector<int> dinSequence;   // DIN node ids in time order
  int csink = -1;
};

struct DinOption {
  int node = -1;
  Minutes wait = 0;  // cyclic wait from the demand's release
  int service = -1;
  int stop = -1;
};

class TimeSpaceNetwork {
 public:
  std::vector<EventNode> nodes;
  std::vector<NetworkArc> arcs;
  std::vector<TerminalEvents> terminals;
  // departures[s][i] / arrivals[s][i]: companions for stop i of service s (index valid where defined)
  std::vector<std::vector<EventGroup>> departures;
  std::vector<std::vector<EventGroup>> arrivals;
  std::vector<std::vector<int>> movingArcs;    // [service][leg]
  std::vector<std::vector<int>> handlingArcs;  // [service][stop], -1 at ends
  std::vector<int> artificialArcs;             // [demand]
  std::vector<int> poolPosition;               // node id -> index in its terminal's pool sequence, else -1
  Minutes T = kWeekMinutes;
  Minutes transferTime = 0;

  const EventNode& node(int id) const { return nodes.at(id); }
  const NetworkArc& arc(int id) const { return arcs.at(id); }
  int departureOrdinal(int service, int stop) const;
  // earliest elapsed time from the departure event to any arrival at terminal
  Minutes travelTime(int service, int stop, int terminal) const;
  std::size_t departureCount() const { return departureIndex_.size(); }
  int previousPoolNode(int poolNode) const;

  std::string toJson() const;
  std::string toDot(const Instance& inst) const;

 private:
  friend TimeSpaceNetwork buildNetwork(const Instance& inst);
  std::vector<std::pair<int, int>> departureIndex_;  // ordinal -> (service, stop)
  std::vector<std::vector<int>> departureOrdinal_;   // [service][stop] -> ordinal or -1
  std::vector<std::vector<Minutes>> travel_;          // [ordinal][terminal]
};

TimeSpaceNetwork buildNetwork(const Instance& inst);

// Departures the demand can take while still arriving within its window, by cyclic wait.
std::vector<DinOption> dinNodesForDemand(const TimeSpaceNetwork& net, const Demand& demand);

// Minimum release-to-arrival elapsed time, kUnreachable when no route exists.
Minutes shortestPathTime(const TimeSpaceNetwork& net, const Demand& demand);

}  // namespace railplan
