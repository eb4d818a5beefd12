#include "railplan/network.hpp"

#include <algorithm>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

namespace railplan {

const char* toString(Layer l) {
  switch (l) {
    case Layer::Train: return "train";
    case Layer::Block: return "block";
    case Layer::Car: return "car";
    case Layer::Container: return "container";
  }
  return "?";
}

const char* toString(NodeKind k) {
  switch (k) {
    case NodeKind::TIN: return "TIN";
    case NodeKind::TOUT: return "TOUT";
    case NodeKind::BO: return "BO";
    case NodeKind::BD: return "BD";
    case NodeKind::BT: return "BT";
    case NodeKind::PoolPlus: return "POOLPLUS";
    case NodeKind::PoolMinus: return "POOLMINUS";
    case NodeKind::CO: return "CO";
    case NodeKind::CD: return "CD";
    case NodeKind::DIN: return "DIN";
    case NodeKind::DOUT: return "DOUT";
    case NodeKind::CSink: return "CSINK";
  }
  return "?";
}

const char* toString(ArcKind k) {
  switch (k) {
    case ArcKind::TrainMoving: return "TrainMoving";
    case ArcKind::TrainHandling: return "TrainHandling";
    case ArcKind::ContainerWait: return "ContainerWait";
    case ArcKind::ContainerLoad: return "ContainerLoad";
    case ArcKind::Pool2Pool: return "Pool2Pool";
    case ArcKind::Pool2Load: return "Pool2Load";
    case ArcKind::Pool2Block: return "Pool2Block";
    case ArcKind::Car2Block: return "Car2Block";
    case ArcKind::BlockBuild: return "BlockBuild";
    case ArcKind::BlockTransfer: return "BlockTransfer";
    case ArcKind::BlockAttach: return "BlockAttach";
    case ArcKind::BlockDismantle: return "BlockDismantle";
    case ArcKind::Empty2Pool: return "Empty2Pool";
    case ArcKind::CarsDest: return "CarsDest";
    case ArcKind::Unloaded2Pool: return "Unloaded2Pool";
    case ArcKind::ContainerDest: return "ContainerDest";
    case ArcKind::ContainerSink: return "ContainerSink";
    case ArcKind::Artificial: return "Artificial";
  }
  return "?";
}

int TimeSpaceNetwork::departureOrdinal(int service, int stop) const {
  if (service < 0 || service >= static_cast<int>(departureOrdinal_.size())) return -1;
  const auto& row = departureOrdinal_[service];
  if (stop < 0 || stop >= static_cast<int>(row.size())) return -1;
  return row[stop];
}

Minutes TimeSpaceNetwork::travelTime(int service, int stop, int terminal) const {
  int d = departureOrdinal(service, stop);
  if (d < 0) return kUnreachable;
  return travel_[d].at(terminal);
}

int TimeSpaceNetwork::previousPoolNode(int poolNode) const {
  const EventNode& n = node(poolNode);
  const auto& seq = terminals.at(n.terminal).poolSequence;
  int p = poolPosition.at(poolNode);
  return seq[(p + seq.size() - 1) % seq.size()];
}

namespace {

struct Builder {
  const Instance& inst;
  TimeSpaceNetwork& net;

  int addNode(Layer layer, NodeKind kind, int terminal, std::optional<Minutes> t, int service, int stop) {
    EventNode n{static_cast<int>(net.nodes.size()), layer, kind, terminal, t, service, stop};
    net.nodes.push_back(n);
    return n.id;
  }

  int addArc(ArcKind kind, int tail, int head, bool wraps = false) {
    NetworkArc a;
    a.id = static_cast<int>(net.arcs.size());
    a.kind = kind;
    a.tail = tail;
    a.head = head;
    a.wraps = wraps;
    net.arcs.push_back(a);
    return a.id;
  }

  Minutes timeOf(int node) const { return *net.nodes[node].time; }
};

struct EventKey {
  Minutes time;
  int cls;  // 0 arrival, 1 departure
  const std::string* service;
  int stop;
  int serviceIndex;
  bool operator<(const EventKey& o) const {
    return std::tie(time, cls, *service, stop) < std::tie(o.time, o.cls, *o.service, o.stop);
  }
};

}  // namespace

TimeSpaceNetwork buildNetwork(const Instance& inst) {
  if (inst.services.empty()) throw std::invalid_argument("cannot build a network from an empty schedule");
  TimeSpaceNetwork net;
  net.T = inst.T();
  net.transferTime = inst.config.transferTime;
  Builder b{inst, net};
  const int nt = static_cast<int>(inst.terminals.size());
  const int ns = static_cast<int>(inst.services.size());
  net.terminals.resize(nt);
  net.departures.resize(ns);
  net.arrivals.resize(ns);
  net.movingArcs.resize(ns);
  net.handlingArcs.resize(ns);

  // Per-terminal events in tie-rule order.
  std::vector<std::vector<EventKey>> events(nt);
  for (int s = 0; s < ns; ++s) {
    const TrainService& svc = inst.services[s];
    for (int i = 0; i < static_cast<int>(svc.stops.size()); ++i) {
      const Stop& st = svc.stops[i];
      if (st.arrival) events[st.terminal].push_back({*st.arrival, 0, &svc.id, i, s});
      if (st.departure) events[st.terminal].push_back({*st.departure, 1, &svc.id, i, s});
    }
    net.departures[s].resize(svc.stops.size());
    net.arrivals[s].resize(svc.stops.size());
  }

  for (int th = 0; th < nt; ++th) {
    auto& evs = events[th];
    std::sort(evs.begin(), evs.end());
    TerminalEvents& te = net.terminals[th];
    for (const EventKey& e : evs) {
      if (e.cls == 1) {
        EventGroup g;
        g.train = b.addNode(Layer::Train, NodeKind::TOUT, th, e.time, e.serviceIndex, e.stop);
        g.transfer = b.addNode(Layer::Block, NodeKind::BT, th, e.time, e.serviceIndex, e.stop);
        g.block = b.addNode(Layer::Block, NodeKind::BO, th, e.time, e.serviceIndex, e.stop);
        g.pool = b.addNode(Layer::Car, NodeKind::PoolMinus, th, e.time, e.serviceIndex, e.stop);
        g.car = b.addNode(Layer::Car, NodeKind::CO, th, e.time, e.serviceIndex, e.stop);
        g.container = b.addNode(Layer::Container, NodeKind::DIN, th, e.time, e.serviceIndex, e.stop);
        net.departures[e.serviceIndex][e.stop] = g;
        te.events.push_back(g.train);
        te.poolSequence.push_back(g.pool);
        te.dinSequence.push_back(g.container);
      } else {
        EventGroup g;
        g.train = b.addNode(Layer::Train, NodeKind::TIN, th, e.time, e.serviceIndex, e.stop);
        g.block = b.addNode(Layer::Block, NodeKind::BD, th, e.time, e.serviceIndex, e.stop);
        g.pool = b.addNode(Layer::Car, NodeKind::PoolPlus, th, e.time, e.serviceIndex, e.stop);
        g.car = b.addNode(Layer::Car, NodeKind::CD, th, e.time, e.serviceIndex, e.stop);
        g.container = b.addNode(Layer::Container, NodeKind::DOUT, th, e.time, e.serviceIndex, e.stop);
        net.arrivals[e.serviceIndex][e.stop] = g;
        te.events.push_back(g.train);
        te.poolSequence.push_back(g.pool);
      }
    }
    te.csink = b.addNode(Layer::Container, NodeKind::CSink, th, std::nullopt, -1, -1);
  }

  net.poolPosition.assign(net.nodes.size(), -1);
  for (const auto& te : net.terminals)
    for (std::size_t p = 0; p < te.poolSequence.size(); ++p) net.poolPosition[te.poolSequence[p]] = static_cast<int>(p);

  // Train layer.
  for (int s = 0; s < ns; ++s) {
    const TrainService& svc = inst.services[s];
    const int nstop = static_cast<int>(svc.stops.size());
    net.movingArcs[s].assign(svc.legs.size(), -1);
    net.handlingArcs[s].assign(nstop, -1);
    for (int l = 0; l + 1 < nstop; ++l) {
      int tail = net.departures[s][l].train, head = net.arrivals[s][l + 1].train;
      int a = b.addArc(ArcKind::TrainMoving, tail, head, b.timeOf(head) < b.timeOf(tail));
      net.arcs[a].capacity = svc.legs[l].capacity;
      net.arcs[a].distance = svc.legs[l].distance;
      net.arcs[a].service = s;
      net.arcs[a].leg = l;
      net.movingArcs[s][l] = a;
    }
    for (int i = 1; i + 1 < nstop; ++i) {
      int tail = net.arrivals[s][i].train, head = net.departures[s][i].train;
      int a = b.addArc(ArcKind::TrainHandling, tail, head, b.timeOf(head) < b.timeOf(tail));
      net.arcs[a].service = s;
      net.arcs[a].leg = i;
      net.handlingArcs[s][i] = a;
    }
  }

  // Embarking and disembarking companions, per event.
  for (int s = 0; s < ns; ++s) {
    for (std::size_t i = 0; i < inst.services[s].stops.size(); ++i) {
      const EventGroup& d = net.departures[s][i];
      if (d.train >= 0) {
        b.addArc(ArcKind::ContainerLoad, d.container, d.car);
        b.addArc(ArcKind::Pool2Load, d.pool, d.car);
        b.addArc(ArcKind::Pool2Block, d.pool, d.block);
        b.addArc(ArcKind::Car2Block, d.car, d.block);
        b.addArc(ArcKind::BlockBuild, d.block, d.transfer);
        b.addArc(ArcKind::BlockAttach, d.transfer, d.train);
      }
      const EventGroup& a = net.arrivals[s][i];
      if (a.train >= 0) {
        b.addArc(ArcKind::BlockDismantle, a.train, a.block);
        b.addArc(ArcKind::Empty2Pool, a.block, a.pool);
        b.addArc(ArcKind::CarsDest, a.block, a.car);
        b.addArc(ArcKind::Unloaded2Pool, a.car, a.pool);
        b.addArc(ArcKind::ContainerDest, a.car, a.container);
        b.addArc(ArcKind::ContainerSink, a.container, net.terminals[net.nodes[a.container].terminal].csink);
      }
    }
  }

  // Cyclic chains.
  for (const auto& te : net.terminals) {
    const auto& pool = te.poolSequence;
    for (std::size_t p = 0; p < pool.size(); ++p)
      b.addArc(ArcKind::Pool2Pool, pool[p], pool[(p + 1) % pool.size()], p + 1 == pool.size());
    const auto& din = te.dinSequence;
    for (std::size_t p = 0; p < din.size(); ++p)
      b.addArc(ArcKind::ContainerWait, din[p], din[(p + 1) % din.size()], p + 1 == din.size());
  }

  // Block transfers: TIN -> BT at the same terminal with enough slack.
  for (int th = 0; th < nt; ++th) {
    const auto& evs = net.terminals[th].events;
    for (int in : evs) {
      const EventNode& ni = net.nodes[in];
      if (ni.kind != NodeKind::TIN) continue;
      for (int out : evs) {
        const EventNode& no = net.nodes[out];
        if (no.kind != NodeKind::TOUT) continue;
        if (no.service == ni.service && no.stop == ni.stop) continue;
        Minutes slack = cyclicDuration(*ni.time, *no.time, net.T);
        if (slack < net.transferTime) continue;
        int bt = net.departures[no.service][no.stop].transfer;
        b.addArc(ArcKind::BlockTransfer, in, bt, *no.time < *ni.time);
      }
    }
  }

  // Earliest arrival from each departure event to every terminal.
  std::vector<int> trainIndex(net.nodes.size(), -1);
  std::vector<int> trainNodes;
  for (const auto& n : net.nodes)
    if (n.layer == Layer::Train) {
      trainIndex[n.id] = static_cast<int>(trainNodes.size());
      trainNodes.push_back(n.id);
    }
  std::vector<std::vector<std::pair<int, Minutes>>> adj(trainNodes.size());
  for (const auto& a : net.arcs) {
    if (a.kind == ArcKind::TrainMoving || a.kind == ArcKind::TrainHandling) {
      adj[trainIndex[a.tail]].push_back(
          {trainIndex[a.head], cyclicDuration(b.timeOf(a.tail), b.timeOf(a.head), net.T)});
    } else if (a.kind == ArcKind::BlockTransfer) {
      const EventNode& bt = net.nodes[a.head];
      int tout = net.departures[bt.service][bt.stop].train;
      adj[trainIndex[a.tail]].push_back({trainIndex[tout], cyclicDuration(b.timeOf(a.tail), b.timeOf(tout), net.T)});
    }
  }
  net.departureOrdinal_.resize(ns);
  for (int s = 0; s < ns; ++s) net.departureOrdinal_[s].assign(inst.services[s].stops.size(), -1);
  for (int th = 0; th < nt; ++th)
    for (int out : net.terminals[th].events) {
      const EventNode& n = net.nodes[out];
      if (n.kind != NodeKind::TOUT) continue;
      net.departureOrdinal_[n.service][n.stop] = static_cast<int>(net.departureIndex_.size());
      net.departureIndex_.push_back({n.service, n.stop});
    }
  net.travel_.assign(net.departureIndex_.size(), std::vector<Minutes>(nt, kUnreachable));
  using Item = std::pair<Minutes, int>;
  for (std::size_t d = 0; d < net.departureIndex_.size(); ++d) {
    auto [s, i] = net.departureIndex_[d];
    std::vector<Minutes> dist(trainNodes.size(), kUnreachable);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    int src = trainIndex[net.departures[s][i].train];
    dist[src] = 0;
    pq.push({0, src});
    while (!pq.empty()) {
      auto [du, u] = pq.top();
      pq.pop();
      if (du != dist[u]) continue;
      const EventNode& nu = net.nodes[trainNodes[u]];
      if (nu.kind == NodeKind::TIN) net.travel_[d][nu.terminal] = std::min(net.travel_[d][nu.terminal], du);
      for (auto [v, w] : adj[u])
        if (du + w < dist[v]) {
          dist[v] = du + w;
          pq.push({dist[v], v});
        }
    }
  }

  // Artificial arcs attach at each demand's latest feasible departure.
  for (std::size_t k = 0; k < inst.demands.size(); ++k) {
    const Demand& dem = inst.demands[k];
    auto opts = dinNodesForDemand(net, dem);
    int tail = -1;
    if (!opts.empty())
      tail = std::max_element(opts.begin(), opts.end(), [](const DinOption& a, const DinOption& b) {
               return std::tie(a.wait, a.node) < std::tie(b.wait, b.node);
             })->node;
    int a = b.addArc(ArcKind::Artificial, tail, net.terminals[dem.destination].csink);
    net.arcs[a].demand = static_cast<int>(k);
    net.artificialArcs.push_back(a);
  }
  return net;
}

std::vector<DinOption> dinNodesForDemand(const TimeSpaceNetwork& net, const Demand& demand) {
  std::vector<DinOption> out;
  if (demand.origin < 0 || demand.origin >= static_cast<int>(net.terminals.size()))
    throw std::invalid_argument("demand origin is not part of the network");
  const Minutes window = cyclicDuration(demand.release, demand.due, net.T);
  for (int din : net.terminals[demand.origin].dinSequence) {
    const EventNode& n = net.node(din);
    Minutes wait = cyclicDuration(demand.release, *n.time, net.T);
    Minutes travel = net.travelTime(n.service, n.stop, demand.destination);
    if (travel == kUnreachable || wait + travel > window) continue;
    out.push_back({din, wait, n.service, n.stop});
  }
  std::sort(out.begin(), out.end(),
            [](const DinOption& a, const DinOption& b) { return std::tie(a.wait, a.node) < std::tie(b.wait, b.node); });
  return out;
}

Minutes shortestPathTime(const TimeSpaceNetwork& net, const Demand& demand) {
  Minutes best = kUnreachable;
  if (demand.origin < 0 || demand.origin >= static_cast<int>(net.terminals.size())) return best;
  for (int din : net.terminals[demand.origin].dinSequence) {
    const EventNode& n = net.node(din);
    Minutes travel = net.travelTime(n.service, n.stop, demand.destination);
    if (travel == kUnreachable) continue;
    best = std::min(best, cyclicDuration(demand.release, *n.time, net.T) + travel);
  }
  return best;
}

std::string TimeSpaceNetwork::toJson() const {
  nlohmann::ordered_json doc;
  doc["T"] = T;
  doc["transferTime"] = transferTime;
  doc["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : nodes) {
    nlohmann::ordered_json o{{"id", n.id}, {"layer", toString(n.layer)}, {"kind", toString(n.kind)},
                             {"terminal", n.terminal}};
    o["time"] = n.time ? nlohmann::ordered_json(*n.time) : nlohmann::ordered_json(nullptr);
    o["service"] = n.service;
    o["stop"] = n.stop;
    doc["nodes"].push_back(o);
  }
  doc["arcs"] = nlohmann::ordered_json::array();
  for (const auto& a : arcs) {
    nlohmann::ordered_json o{{"id", a.id}, {"kind", toString(a.kind)}, {"tail", a.tail}, {"head", a.head},
                             {"wraps", a.wraps}};
    if (a.kind == ArcKind::TrainMoving) {
      o["capacity"] = a.capacity;
      o["distance"] = a.distance;
    }
    if (a.service >= 0) o["service"] = a.service;
    if (a.leg >= 0) o["leg"] = a.leg;
    if (a.demand >= 0) o["demand"] = a.demand;
    doc["arcs"].push_back(o);
  }
  return doc.dump(1) + "\n";
}

std::string TimeSpaceNetwork::toDot(const Instance& inst) const {
  std::ostringstream os;
  os << "digraph tsn {\n  rankdir=LR;\n";
  for (std::size_t th = 0; th < terminals.size(); ++th) {
    os << "  subgraph cluster_" << th << " {\n    label=\"" << inst.terminals[th].id << "\";\n";
    for (const auto& n : nodes)
      if (n.terminal == static_cast<int>(th)) {
        os << "    n" << n.id << " [label=\"" << toString(n.kind);
        if (n.time) os << "\\n" << *n.time;
        os << "\"];\n";
      }
    os << "  }\n";
  }
  for (const auto& a : arcs) {
    if (a.tail < 0) continue;
    os << "  n" << a.tail << " -> n" << a.head << " [label=\"" << toString(a.kind) << "\"";
    if (a.wraps) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace railplan
