#include "railplan/blocks.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

namespace railplan {

namespace {

Minutes legTravel(const Instance& inst, LegRef r) {
  const TrainService& s = inst.services[r.service];
  return cyclicDuration(s.departureAt(r.leg), s.arrivalAt(r.leg + 1), inst.T());
}

int legFrom(const Instance& inst, LegRef r) { return inst.services[r.service].stops[r.leg].terminal; }
int legTo(const Instance& inst, LegRef r) { return inst.services[r.service].stops[r.leg + 1].terminal; }

}  // namespace

BlockPath computeAttributes(BlockPath b, const Instance& inst) {
  const Minutes T = inst.T();
  const CostParams& c = inst.costs;
  b.origin = legFrom(inst, b.legs.front());
  b.destination = legTo(inst, b.legs.back());
  b.departure = inst.services[b.legs.front().service].departureAt(b.legs.front().leg);
  b.arrival = inst.services[b.legs.back().service].arrivalAt(b.legs.back().leg + 1);
  b.capacity = 0;
  b.distance = 0;
  b.transfers = 0;
  b.transferWait = 0;
  b.borderCrossings = 0;
  b.transferTerminals.clear();
  b.usesExtraService = false;
  for (std::size_t i = 0; i < b.legs.size(); ++i) {
    const LegRef r = b.legs[i];
    const TrainService& s = inst.services[r.service];
    const Leg& leg = s.legs[r.leg];
    b.capacity = i == 0 ? leg.capacity : std::min(b.capacity, leg.capacity);
    b.distance += leg.distance;
    b.usesExtraService = b.usesExtraService || s.isExtra();
    if (inst.terminals[legFrom(inst, r)].region != inst.terminals[legTo(inst, r)].region) ++b.borderCrossings;
    if (i > 0) {
      const LegRef p = b.legs[i - 1];
      Minutes arr = inst.services[p.service].arrivalAt(p.leg + 1);
      Minutes gap = cyclicDuration(arr, s.departureAt(r.leg), T);
      if (p.service != r.service || p.leg + 1 != r.leg) {
        ++b.transfers;
        b.transferWait += gap;
        b.transferTerminals.push_back(legFrom(inst, r));
      }
    }
  }
  b.duration = cyclicDuration(b.departure, b.arrival, T);
  b.wraps = b.departure > b.arrival;
  b.buildCost = c.build + c.trans * b.transfers;
  return b;
}

std::string checkLegSequence(const std::vector<LegRef>& legs, const Instance& inst) {
  if (legs.empty()) return "empty leg sequence";
  const Minutes T = inst.T();
  std::set<int> seen;
  Minutes elapsed = 0;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    LegRef r = legs[i];
    if (r.service < 0 || r.service >= static_cast<int>(inst.services.size())) return "service index out of range";
    if (r.leg < 0 || r.leg >= static_cast<int>(inst.services[r.service].legs.size())) return "leg index out of range";
    if (i == 0) seen.insert(legFrom(inst, r));
    if (i > 0) {
      LegRef p = legs[i - 1];
      if (legTo(inst, p) != legFrom(inst, r)) return "legs " + std::to_string(i - 1) + "," + std::to_string(i) + " not adjacent";
      bool stay = p.service == r.service && p.leg + 1 == r.leg;
      Minutes gap = cyclicDuration(inst.services[p.service].arrivalAt(p.leg + 1),
                                   inst.services[r.service].departureAt(r.leg), T);
      if (!stay && gap < inst.config.transferTime) return "transfer at leg " + std::to_string(i) + " violates t_trans";
      elapsed += gap;
    }
    elapsed += legTravel(inst, r);
    if (!seen.insert(legTo(inst, r)).second) return "terminal revisited at leg " + std::to_string(i);
  }
  if (elapsed >= T) return "block duration reaches the schedule length";
  return {};
}

Minutes lateness(const BlockPath& b, const Demand& d, const TimeSpaceNetwork& net) {
  Minutes sp = shortestPathTime(net, d);
  Minutes total = cyclicDuration(d.release, b.departure, net.T) + b.duration;
  if (sp == kUnreachable) return 0;
  return std::max<Minutes>(0, total - sp);
}

std::pair<std::vector<std::vector<CompatibleBlock>>, std::vector<std::vector<int>>> demandCompatibility(
    const std::vector<BlockPath>& blocks, const std::vector<Demand>& demands, const TimeSpaceNetwork& net) {
  std::vector<std::vector<CompatibleBlock>> bk(demands.size());
  std::vector<std::vector<int>> kb(blocks.size());
  for (std::size_t k = 0; k < demands.size(); ++k) {
    const Demand& d = demands[k];
    const Minutes window = cyclicDuration(d.release, d.due, net.T);
    const Minutes sp = shortestPathTime(net, d);
    for (const BlockPath& b : blocks) {
      if (b.origin != d.origin || b.destination != d.destination) continue;
      Minutes wait = cyclicDuration(d.release, b.departure, net.T);
      if (wait + b.duration > window) continue;
      Minutes late = sp == kUnreachable ? 0 : std::max<Minutes>(0, wait + b.duration - sp);
      bk[k].push_back({b.id, wait, late});
      kb[b.id].push_back(static_cast<int>(k));
    }
  }
  return {std::move(bk), std::move(kb)};
}

namespace {

struct Dfs {
  const Instance& inst;
  const TimeSpaceNetwork& net;
  int maxTransfers;
  Minutes maxElapsed;
  const std::set<std::pair<int, int>>* pairs;
  std::vector<std::pair<int, std::vector<LegRef>>> found;  // (root TOUT node, legs)

  std::vector<LegRef> legs;
  std::vector<char> visited;
  int root = -1;

  void extend(Minutes elapsed, int transfers) {
    const LegRef last = legs.back();
    const TrainService& s = inst.services[last.service];
    const int at = legTo(inst, last);
    if (!pairs || pairs->count({legFrom(inst, legs.front()), at})) found.push_back({root, legs});
    const Minutes arr = s.arrivalAt(last.leg + 1);

    auto tryLeg = [&](LegRef next, Minutes gap, int t) {
      Minutes e = elapsed + gap + legTravel(inst, next);
      if (e > maxElapsed || e >= inst.T()) return;
      int to = legTo(inst, next);
      if (visited[to]) return;
      visited[to] = 1;
      legs.push_back(next);
      extend(e, t);
      legs.pop_back();
      visited[to] = 0;
    };

    if (last.leg + 1 < static_cast<int>(s.legs.size()))
      tryLeg({last.service, last.leg + 1}, cyclicDuration(arr, s.departureAt(last.leg + 1), inst.T()), transfers);
    if (transfers >= maxTransfers) return;
    for (int ev : net.terminals[at].events) {
      const EventNode& n = net.node(ev);
      if (n.kind != NodeKind::TOUT) continue;
      if (n.service == last.service && n.stop == last.leg + 1) continue;
      Minutes gap = cyclicDuration(arr, *n.time, inst.T());
      if (gap < inst.config.transferTime) continue;
      tryLeg({n.service, n.stop}, gap, transfers + 1);
    }
  }
};

}  // namespace

BlockCatalog generateBlocks(const Instance& inst, const TimeSpaceNetwork& net, const BlockLimits& limits) {
  BlockCatalog cat;
  std::set<std::pair<int, int>> pairs;
  for (const auto& d : inst.demands) pairs.insert({d.origin, d.destination});
  Dfs dfs{inst, net, limits.maxTransfers, std::min(limits.maxElapsed.value_or(inst.T()), inst.T()),
          limits.demandPairsOnly ? &pairs : nullptr, {}, {}, {}, -1};
  dfs.visited.assign(inst.terminals.size(), 0);
  for (const auto& te : net.terminals)
    for (int ev : te.events) {
      const EventNode& n = net.node(ev);
      if (n.kind != NodeKind::TOUT) continue;
      LegRef first{n.service, n.stop};
      Minutes e = legTravel(inst, first);
      if (e > dfs.maxElapsed || e >= inst.T()) continue;
      int from = legFrom(inst, first), to = legTo(inst, first);
      if (from == to) continue;
      dfs.root = ev;
      dfs.visited[from] = 1;
      dfs.visited[to] = 1;
      dfs.legs = {first};
      dfs.extend(e, 0);
      dfs.visited[from] = 0;
      dfs.visited[to] = 0;
    }
  std::sort(dfs.found.begin(), dfs.found.end());
  dfs.found.erase(std::unique(dfs.found.begin(), dfs.found.end()), dfs.found.end());

  for (auto& [root, legs] : dfs.found) {
    BlockPath b;
    b.id = static_cast<int>(cat.blocks.size());
    b.legs = std::move(legs);
    cat.blocks.push_back(computeAttributes(std::move(b), inst));
  }
  if (cat.blocks.empty()) cat.warnings.push_back("block catalog is empty");

  auto [bk, kb] = demandCompatibility(cat.blocks, inst.demands, net);
  cat.demandBlocks = std::move(bk);
  cat.blockDemands = std::move(kb);

  cat.arcBlocks.assign(net.arcs.size(), {});
  cat.poolDepartures.assign(net.nodes.size(), {});
  cat.poolArrivals.assign(net.nodes.size(), {});
  cat.formedAt.assign(inst.terminals.size(), {});
  cat.wrapFormedAt.assign(inst.terminals.size(), {});
  for (const BlockPath& b : cat.blocks) {
    for (std::size_t i = 0; i < b.legs.size(); ++i) {
      LegRef r = b.legs[i];
      cat.arcBlocks[net.movingArcs[r.service][r.leg]].push_back(b.id);
      if (i + 1 < b.legs.size() && b.legs[i + 1].service == r.service && b.legs[i + 1].leg == r.leg + 1)
        cat.arcBlocks[net.handlingArcs[r.service][r.leg + 1]].push_back(b.id);
    }
    const EventGroup& dep = net.departures[b.legs.front().service][b.legs.front().leg];
    const EventGroup& arr = net.arrivals[b.legs.back().service][b.legs.back().leg + 1];
    cat.departureNode.push_back(dep.train);
    cat.arrivalNode.push_back(arr.train);
    cat.poolDepartures[dep.pool].push_back(b.id);
    cat.poolArrivals[arr.pool].push_back(b.id);
    cat.formedAt[b.origin].push_back(b.id);
    if (b.wraps) cat.wrapFormedAt[b.origin].push_back(b.id);
  }
  return cat;
}

std::string BlockCatalog::toJsonLines(const Instance& inst) const {
  std::ostringstream os;
  for (const BlockPath& b : blocks) {
    nlohmann::ordered_json o;
    o["id"] = b.id;
    o["origin"] = inst.terminals[b.origin].id;
    o["destination"] = inst.terminals[b.destination].id;
    o["departure"] = b.departure;
    o["arrival"] = b.arrival;
    o["legs"] = nlohmann::ordered_json::array();
    for (LegRef r : b.legs) o["legs"].push_back({inst.services[r.service].id, r.leg});
    o["transferTerminals"] = nlohmann::ordered_json::array();
    for (int t : b.transferTerminals) o["transferTerminals"].push_back(inst.terminals[t].id);
    o["capacity"] = b.capacity;
    o["transfers"] = b.transfers;
    o["borderCrossings"] = b.borderCrossings;
    o["distance"] = b.distance;
    o["transferWait"] = b.transferWait;
    o["duration"] = b.duration;
    o["wraps"] = b.wraps;
    o["buildCost"] = b.buildCost.toString();
    o["usesExtraService"] = b.usesExtraService;
    o["demands"] = blockDemands.empty() ? nlohmann::ordered_json::array() : nlohmann::ordered_json(blockDemands[b.id]);
    os << o.dump() << "\n";
  }
  return os.str();
}

}  // namespace railplan
