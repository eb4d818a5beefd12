#include "railplan/oracle.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>

namespace railplan::oracle {

namespace {

Minutes cyc(Minutes from, Minutes to, Minutes T) { return ((to - from) % T + T) % T; }

// Loads for platforms [p, eta) of one car.
void platformLoads(const RailcarType& car, int p, ContainerCounts acc, std::set<ContainerCounts>& out) {
  if (p == car.platformCount) {
    out.insert(acc);
    return;
  }
  const bool p53 = car.platform == PlatformType::P53;
  const bool top53 = p53 || car.platformCount == 1 || p % 2 == 0;
  auto go = [&](int a, int b) { platformLoads(car, p + 1, {acc.n40 + a, acc.n53 + b}, out); };
  go(0, 0);
  // bottom 40, optional top
  go(1, 0);
  go(2, 0);
  if (top53) go(1, 1);
  if (p53) {
    go(0, 1);
    go(1, 1);  // 53 bottom, 40 top
    go(0, 2);
  }
}

std::set<ContainerCounts> combine(const std::vector<RailcarType>& cars, bool allUsed, ContainerCounts cap) {
  std::set<ContainerCounts> reach{{0, 0}};
  for (const RailcarType& car : cars) {
    std::set<ContainerCounts> next;
    for (ContainerCounts l : carLoads(car)) {
      if (allUsed && l.n40 + l.n53 == 0) continue;
      for (ContainerCounts r : reach) {
        ContainerCounts s{r.n40 + l.n40, r.n53 + l.n53};
        if (s.n40 <= cap.n40 && s.n53 <= cap.n53) next.insert(s);
      }
    }
    reach = std::move(next);
  }
  return reach;
}

}  // namespace

std::vector<ContainerCounts> carLoads(const RailcarType& car) {
  std::set<ContainerCounts> s;
  platformLoads(car, 0, {0, 0}, s);
  return {s.begin(), s.end()};
}

bool slotLoadingFeasible(ContainerCounts c, const std::vector<RailcarType>& cars) {
  return combine(cars, false, c).count(c) > 0;
}

bool slotLoadingFeasibleAllUsed(ContainerCounts c, const std::vector<RailcarType>& cars) {
  return combine(cars, true, c).count(c) > 0;
}

bool countingFeasible(ContainerCounts c, const std::vector<RailcarType>& cars) {
  // distinct types with multiplicity
  std::vector<std::pair<RailcarType, int>> types;
  for (const RailcarType& r : cars) {
    auto it = std::find_if(types.begin(), types.end(), [&](const auto& t) { return t.first == r; });
    if (it == types.end()) types.push_back({r, 1});
    else ++it->second;
  }
  struct Caps {
    int plat40 = 0, plat53 = 0, cars40 = 0, cars53 = 0, mixed40 = 0;
  };
  std::vector<Caps> options{{}};
  for (const auto& [car, mult] : types) {
    std::vector<Caps> next;
    for (const Caps& o : options)
      for (int x = 0; x <= mult; ++x) {
        Caps n = o;
        if (car.platform == PlatformType::P40) {
          n.plat40 += car.platformCount * x;
          n.cars40 += x;
          n.mixed40 += (car.platformCount + 1) / 2 * x;
        } else {
          n.plat53 += car.platformCount * x;
          n.cars53 += x;
        }
        next.push_back(n);
      }
    options = std::move(next);
  }
  // a: 40 alone on P40, b: 40 alone on P53, cc: 53 alone on P53, d: 40/40 on P40, e: 40/53 on P40,
  // f: 40/40 on P53, g: 40/53 on P53, h: 53/53 on P53
  for (int e = 0; e <= std::min(c.n40, c.n53); ++e)
    for (int g = 0; e + g <= std::min(c.n40, c.n53); ++g)
      for (int h = 0; e + g + 2 * h <= c.n53; ++h) {
        int cc = c.n53 - e - g - 2 * h;
        int rest40 = c.n40 - e - g;
        for (int d = 0; 2 * d <= rest40; ++d)
          for (int f = 0; 2 * d + 2 * f <= rest40; ++f)
            for (int a = 0; 2 * d + 2 * f + a <= rest40; ++a) {
              int b = rest40 - 2 * d - 2 * f - a;
              int used40 = a + d + e, used53 = b + cc + f + g + h;
              for (const Caps& o : options)
                if (o.plat40 >= used40 && o.plat53 >= used53 && o.cars40 <= used40 && o.cars53 <= used53 &&
                    o.mixed40 >= e)
                  return true;
            }
      }
  return false;
}

namespace {

struct OBlock {
  int id = -1;
  std::vector<LegRef> legs;
  int origin = -1, dest = -1;
  Minutes dep = 0, arr = 0, dur = 0;
  bool wraps = false;
  int capacity = 0;
  std::set<int> services;
  int depEvent = -1, arrEvent = -1;  // index into the terminal's event list
  Money build, move;
};

struct CarPlan {
  Money cost;
  std::vector<std::vector<int>> loaded, empty;
  std::vector<std::vector<long long>> alloc;
};

class Search {
 public:
  Search(const Instance& inst, const BlockCatalog& cat) : inst_(inst), T_(inst.T()), G_(inst.railcars.size()) {
    buildEvents();
    buildBlocks(cat);
    shortestPaths();
    for (std::size_t s = 0; s < inst.services.size(); ++s)
      if (inst.services[s].isExtra()) extras_.push_back(int(s));
  }

  Result run() {
    const int E = static_cast<int>(extras_.size());
    for (int mask = 0; mask < (1 << E); ++mask) {
      mask_ = mask;
      running_.assign(inst_.services.size(), true);
      Money sCost;
      for (int e = 0; e < E; ++e) {
        const TrainService& svc = inst_.services[extras_[e]];
        bool on = mask >> e & 1;
        running_[extras_[e]] = on;
        if (!on) continue;
        Money f = inst_.costs.fix;
        if (svc.fixedCost) f = *svc.fixedCost;
        else
          for (const Leg& l : svc.legs) f += inst_.costs.var * (std::int64_t(l.capacity) * l.distance);
        sCost += f;
      }
      sCost_ = sCost;
      options_.assign(inst_.demands.size(), {});
      for (std::size_t k = 0; k < inst_.demands.size(); ++k)
        for (const auto& [b, cost] : compat_[k])
          if (available(b)) options_[k].push_back({b, cost});
      counts_.assign(blocks_.size(), {});
      flow_.clear();
      unmet_.assign(inst_.demands.size(), 0);
      distribute(0, 0, inst_.demands.empty() ? 0 : inst_.demands[0].volume, Money{});
    }
    if (!found_) throw std::logic_error("oracle found no plan; outsourcing everything should always be feasible");
    res_.leavesVisited = leaves_;
    return res_;
  }

 private:
  const Instance& inst_;
  const Minutes T_;
  const std::size_t G_;
  // per terminal: (time, isDeparture, service id, stop, service)
  std::vector<std::vector<std::tuple<Minutes, int, std::string, int, int>>> events_;
  std::vector<OBlock> blocks_;
  std::vector<std::vector<std::pair<int, Money>>> compat_;
  std::vector<int> extras_;

  int mask_ = 0;
  Money sCost_;
  std::vector<bool> running_;
  std::vector<std::vector<std::pair<int, Money>>> options_;
  std::vector<ContainerCounts> counts_;
  std::map<std::pair<int, int>, int> flow_;
  std::vector<int> unmet_;
  std::map<std::pair<int, std::vector<ContainerCounts>>, std::optional<CarPlan>> memo_;

  bool found_ = false;
  Result res_;
  long long leaves_ = 0;

  int eventIndex(int terminal, int service, int stop, bool departure) const {
    const auto& ev = events_[terminal];
    for (std::size_t i = 0; i < ev.size(); ++i)
      if (std::get<4>(ev[i]) == service && std::get<3>(ev[i]) == stop && std::get<1>(ev[i]) == int(departure))
        return int(i);
    throw std::logic_error("event not found");
  }

  void buildEvents() {
    events_.assign(inst_.terminals.size(), {});
    for (std::size_t s = 0; s < inst_.services.size(); ++s) {
      const TrainService& svc = inst_.services[s];
      for (std::size_t i = 0; i < svc.stops.size(); ++i) {
        const Stop& st = svc.stops[i];
        if (st.arrival) events_[st.terminal].emplace_back(*st.arrival, 0, svc.id, int(i), int(s));
        if (st.departure) events_[st.terminal].emplace_back(*st.departure, 1, svc.id, int(i), int(s));
      }
    }
    for (auto& ev : events_)
      std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a), std::get<2>(a), std::get<3>(a)) <
               std::tie(std::get<0>(b), std::get<1>(b), std::get<2>(b), std::get<3>(b));
      });
  }

  void buildBlocks(const BlockCatalog& cat) {
    const CostParams& c = inst_.costs;
    for (const BlockPath& p : cat.blocks) {
      OBlock b;
      b.id = p.id;
      b.legs = p.legs;
      const LegRef first = p.legs.front(), last = p.legs.back();
      const TrainService& s0 = inst_.services[first.service];
      const TrainService& s1 = inst_.services[last.service];
      b.origin = s0.stops[first.leg].terminal;
      b.dest = s1.stops[last.leg + 1].terminal;
      b.dep = *s0.stops[first.leg].departure;
      b.arr = *s1.stops[last.leg + 1].arrival;
      b.dur = cyc(b.dep, b.arr, T_);
      b.wraps = b.dep > b.arr;
      int transfers = 0, borders = 0, distance = 0;
      Minutes wait = 0;
      b.capacity = std::numeric_limits<int>::max();
      for (std::size_t i = 0; i < p.legs.size(); ++i) {
        const TrainService& s = inst_.services[p.legs[i].service];
        const Leg& leg = s.legs[p.legs[i].leg];
        b.capacity = std::min(b.capacity, leg.capacity);
        distance += leg.distance;
        b.services.insert(p.legs[i].service);
        if (inst_.terminals[s.stops[p.legs[i].leg].terminal].region !=
            inst_.terminals[s.stops[p.legs[i].leg + 1].terminal].region)
          ++borders;
        if (i > 0) {
          const LegRef q = p.legs[i - 1];
          if (q.service != p.legs[i].service || q.leg + 1 != p.legs[i].leg) {
            ++transfers;
            wait += cyc(*inst_.services[q.service].stops[q.leg + 1].arrival, *s.stops[p.legs[i].leg].departure, T_);
          }
        }
      }
      b.build = c.build + c.trans * transfers;
      b.move = c.wait * wait + c.bord * borders + c.km * distance;
      b.depEvent = eventIndex(b.origin, first.service, first.leg, true);
      b.arrEvent = eventIndex(b.dest, last.service, last.leg + 1, false);
      blocks_.push_back(std::move(b));
    }
  }

  // Earliest arrival over trains, stay-on moves and transfers.
  void shortestPaths() {
    struct Node {
      int service, stop;
      bool dep;
    };
    std::vector<Node> nodes;
    std::map<std::tuple<int, int, bool>, int> id;
    for (std::size_t s = 0; s < inst_.services.size(); ++s)
      for (std::size_t i = 0; i < inst_.services[s].stops.size(); ++i) {
        const Stop& st = inst_.services[s].stops[i];
        if (st.arrival) {
          id[{int(s), int(i), false}] = int(nodes.size());
          nodes.push_back({int(s), int(i), false});
        }
        if (st.departure) {
          id[{int(s), int(i), true}] = int(nodes.size());
          nodes.push_back({int(s), int(i), true});
        }
      }
    auto timeOf = [&](const Node& n) {
      const Stop& st = inst_.services[n.service].stops[n.stop];
      return n.dep ? *st.departure : *st.arrival;
    };
    auto terminalOf = [&](const Node& n) { return inst_.services[n.service].stops[n.stop].terminal; };
    std::vector<std::vector<std::pair<int, Minutes>>> adj(nodes.size());
    for (std::size_t u = 0; u < nodes.size(); ++u) {
      const Node& n = nodes[u];
      if (n.dep) {
        int v = id.at({n.service, n.stop + 1, false});
        adj[u].push_back({v, cyc(timeOf(n), timeOf(nodes[v]), T_)});
        continue;
      }
      for (std::size_t v = 0; v < nodes.size(); ++v) {
        const Node& m = nodes[v];
        if (!m.dep || terminalOf(m) != terminalOf(n)) continue;
        Minutes slack = cyc(timeOf(n), timeOf(m), T_);
        if (m.service == n.service && m.stop == n.stop) adj[u].push_back({int(v), slack});  // stay on board
        else if (slack >= inst_.config.transferTime) adj[u].push_back({int(v), slack});
      }
    }
    const Minutes inf = std::numeric_limits<Minutes>::max();
    const CostParams& c = inst_.costs;
    compat_.assign(inst_.demands.size(), {});
    for (std::size_t k = 0; k < inst_.demands.size(); ++k) {
      const Demand& d = inst_.demands[k];
      // multi-source run: every departure at the origin starts at its wait from the release
      std::vector<Minutes> dist(nodes.size(), inf);
      using Item = std::pair<Minutes, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      for (std::size_t u = 0; u < nodes.size(); ++u)
        if (nodes[u].dep && terminalOf(nodes[u]) == d.origin) {
          dist[u] = cyc(d.release, timeOf(nodes[u]), T_);
          pq.push({dist[u], int(u)});
        }
      Minutes sp = inf;
      while (!pq.empty()) {
        auto [du, u] = pq.top();
        pq.pop();
        if (du != dist[u]) continue;
        if (!nodes[u].dep && terminalOf(nodes[u]) == d.destination) sp = std::min(sp, du);
        for (auto [v, w] : adj[u])
          if (du + w < dist[v]) {
            dist[v] = du + w;
            pq.push({dist[v], v});
          }
      }
      const Minutes window = cyc(d.release, d.due, T_);
      for (const OBlock& b : blocks_) {
        if (b.origin != d.origin || b.dest != d.destination) continue;
        Minutes wait = cyc(d.release, b.dep, T_);
        if (wait + b.dur > window) continue;
        Minutes late = sp == inf ? 0 : std::max<Minutes>(0, wait + b.dur - sp);
        compat_[k].push_back({b.id, b.move + c.late * late});
      }
    }
  }

  bool available(int b) const {
    for (int s : blocks_[b].services)
      if (!running_[s]) return false;
    return true;
  }

  void distribute(std::size_t k, std::size_t opt, int rem, Money cost) {
    if (found_ && !(cost + sCost_ < res_.objective)) return;
    if (k == inst_.demands.size()) {
      evaluate(cost);
      return;
    }
    const Demand& d = inst_.demands[k];
    if (opt == options_[k].size()) {
      unmet_[k] = rem;
      Money c = cost + d.outsourcingCost * rem;
      std::size_t nk = k + 1;
      distribute(nk, 0, nk < inst_.demands.size() ? inst_.demands[nk].volume : 0, c);
      return;
    }
    auto [b, unit] = options_[k][opt];
    for (int n = rem; n >= 0; --n) {
      ContainerCounts& cnt = counts_[b];
      (d.type == ContainerType::T40 ? cnt.n40 : cnt.n53) += n;
      if (n > 0) flow_[{b, int(k)}] = n;
      distribute(k, opt + 1, rem - n, cost + unit * n);
      (d.type == ContainerType::T40 ? cnt.n40 : cnt.n53) -= n;
      flow_.erase({b, int(k)});
    }
  }

  void evaluate(Money flowCost) {
    auto key = std::make_pair(mask_, counts_);
    auto it = memo_.find(key);
    if (it == memo_.end()) it = memo_.emplace(key, solveCars()).first;
    const auto& cars = it->second;
    if (!cars) return;
    Money total = sCost_ + flowCost + cars->cost;
    if (found_ && !(total < res_.objective)) return;
    found_ = true;
    res_.objective = total;
    Plan& p = res_.plan;
    p.extras.clear();
    for (std::size_t e = 0; e < extras_.size(); ++e)
      if (mask_ >> e & 1) p.extras.push_back(extras_[e]);
    p.flow = flow_;
    p.unmet = unmet_;
    p.loaded = cars->loaded;
    p.empty = cars->empty;
    p.allocation = cars->alloc;
    p.builtBlocks.clear();
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      bool used = counts_[b].n40 + counts_[b].n53 > 0;
      for (std::size_t g = 0; g < G_; ++g) used = used || cars->empty[b][g] > 0;
      if (used) p.builtBlocks.push_back(int(b));
    }
  }

  // ---- car layer for fixed container counts ----
  struct CarState {
    std::vector<std::vector<int>> x, w;
    std::vector<int> length;                 // per block
    std::map<std::pair<int, int>, int> leg;  // (service, leg) -> feet
    Money cost;
    std::optional<CarPlan> best;
  };

  int limit(std::size_t g) const { return *inst_.railcars[g].fleetLimit; }

  bool addLength(CarState& st, int b, int feet) {
    st.length[b] += feet;
    bool ok = st.length[b] <= blocks_[b].capacity;
    for (const LegRef& r : blocks_[b].legs) {
      int& l = st.leg[{r.service, r.leg}];
      l += feet;
      if (l > inst_.services[r.service].legs[r.leg].capacity) ok = false;
    }
    return ok;
  }

  std::optional<CarPlan> solveCars() {
    const std::size_t B = blocks_.size();
    CarState st;
    st.x.assign(B, std::vector<int>(G_, 0));
    st.w.assign(B, std::vector<int>(G_, 0));
    st.length.assign(B, 0);
    std::vector<int> loadedBlocks;
    for (std::size_t b = 0; b < B; ++b)
      if (counts_[b].n40 + counts_[b].n53 > 0) {
        loadedBlocks.push_back(int(b));
        st.cost += blocks_[b].build;
      }
    // candidate loaded-car vectors per loaded block
    std::vector<std::vector<std::vector<int>>> cand;
    for (int b : loadedBlocks) {
      std::vector<std::vector<int>> list;
      std::vector<int> x(G_, 0);
      const int maxCars = counts_[b].n40 + counts_[b].n53;
      auto rec = [&](auto&& self, std::size_t g, int cars, int feet) -> void {
        if (g == G_) {
          if (cars == 0) return;
          std::vector<RailcarType> multiset;
          for (std::size_t t = 0; t < G_; ++t)
            for (int i = 0; i < x[t]; ++i) multiset.push_back(inst_.railcars[t]);
          if (slotLoadingFeasibleAllUsed(counts_[b], multiset)) list.push_back(x);
          return;
        }
        for (int n = 0; n <= limit(g) && cars + n <= maxCars; ++n) {
          int f = feet + n * inst_.railcars[g].length;
          if (f > blocks_[b].capacity) break;
          x[g] = n;
          self(self, g + 1, cars + n, f);
        }
        x[g] = 0;
      };
      rec(rec, 0, 0, 0);
      if (list.empty()) return std::nullopt;
      cand.push_back(std::move(list));
    }
    chooseLoaded(st, loadedBlocks, cand, 0);
    return st.best;
  }

  void chooseLoaded(CarState& st, const std::vector<int>& loadedBlocks,
                    const std::vector<std::vector<std::vector<int>>>& cand, std::size_t i) {
    if (i == loadedBlocks.size()) {
      placeEmpties(st);
      return;
    }
    int b = loadedBlocks[i];
    for (const auto& x : cand[i]) {
      int feet = 0;
      for (std::size_t g = 0; g < G_; ++g) feet += x[g] * inst_.railcars[g].length;
      bool ok = addLength(st, b, feet);
      st.x[b] = x;
      if (ok) chooseLoaded(st, loadedBlocks, cand, i + 1);
      addLength(st, b, -feet);
      st.x[b].assign(G_, 0);
    }
  }

  void placeEmpties(CarState& st) {
    std::vector<std::pair<int, int>> order;  // (block, type)
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      if (available(int(b)))
        for (std::size_t g = 0; g < G_; ++g)
          if (limit(g) > 0) order.push_back({int(b), int(g)});
    std::vector<int> lastTouch(inst_.terminals.size(), -1);
    for (std::size_t i = 0; i < order.size(); ++i) {
      lastTouch[blocks_[order[i].first].origin] = int(i);
      lastTouch[blocks_[order[i].first].dest] = int(i);
    }
    std::vector<std::vector<int>> closing(order.size() + 1);
    for (std::size_t t = 0; t < lastTouch.size(); ++t) closing[lastTouch[t] + 1].push_back(int(t));
    // net[terminal][type] = arrivals - departures
    std::vector<std::vector<int>> net(inst_.terminals.size(), std::vector<int>(G_, 0));
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      for (std::size_t g = 0; g < G_; ++g) {
        net[blocks_[b].dest][g] += st.x[b][g];
        net[blocks_[b].origin][g] -= st.x[b][g];
      }
    std::vector<int> emptiesOn(blocks_.size(), 0);
    auto balanced = [&](std::size_t i) {
      for (int t : closing[i])
        for (std::size_t g = 0; g < G_; ++g)
          if (net[t][g] != 0) return false;
      return true;
    };
    if (!balanced(0)) return;

    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (st.best && !(st.cost < st.best->cost)) return;
      if (i == order.size()) {
        leaf(st);
        return;
      }
      auto [b, g] = order[i];
      const OBlock& blk = blocks_[b];
      const int len = inst_.railcars[g].length;
      const bool loaded = counts_[b].n40 + counts_[b].n53 > 0;
      int added = 0;
      for (int n = 0; n <= limit(g); ++n) {
        if (n > 0) {
          added += len;
          if (!addLength(st, b, len)) break;
        }
        st.w[b][g] = n;
        net[blk.dest][g] += n;
        net[blk.origin][g] -= n;
        emptiesOn[b] += n;
        Money extra = blk.move * n;
        if (!loaded && emptiesOn[b] > 0 && emptiesOn[b] == n) extra += blk.build;
        st.cost += extra;
        if (balanced(i + 1)) self(self, i + 1);
        st.cost -= extra;
        emptiesOn[b] -= n;
        net[blk.dest][g] -= n;
        net[blk.origin][g] += n;
        st.w[b][g] = 0;
      }
      addLength(st, b, -added);
    };
    rec(rec, 0);
  }

  void leaf(CarState& st) {
    ++leaves_;
    // minimum load on running extras
    for (int s : extras_) {
      if (!running_[s]) continue;
      const TrainService& svc = inst_.services[s];
      for (int l : svc.thresholdLegs()) {
        auto it = st.leg.find({s, l});
        int feet = it == st.leg.end() ? 0 : it->second;
        if (feet < svc.minLoadFraction * svc.legs[l].capacity - 1e-9) return;
      }
    }
    // railcar inventory around the cycle
    std::vector<std::vector<long long>> alloc(G_, std::vector<long long>(inst_.terminals.size(), 0));
    Money allocCost;
    for (std::size_t g = 0; g < G_; ++g) {
      long long fleet = 0;
      for (std::size_t t = 0; t < inst_.terminals.size(); ++t) {
        std::vector<long long> delta(events_[t].size(), 0);
        long long inTransit = 0;
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
          int cars = st.x[b][g] + st.w[b][g];
          if (cars == 0) continue;
          if (blocks_[b].origin == int(t)) {
            delta[blocks_[b].depEvent] -= cars;
            if (blocks_[b].wraps) inTransit += cars;
          }
          if (blocks_[b].dest == int(t)) delta[blocks_[b].arrEvent] += cars;
        }
        long long level = 0, low = 0;
        for (long long d : delta) {
          level += d;
          low = std::min(low, level);
        }
        if (level != 0) return;
        alloc[g][t] = -low + inTransit;
        fleet += alloc[g][t];
      }
      if (fleet > limit(g)) return;
      allocCost += inst_.costs.alloc * (fleet * inst_.railcars[g].platformCount);
    }
    Money total = st.cost + allocCost;
    if (st.best && !(total < st.best->cost)) return;
    st.best = CarPlan{total, st.x, st.w, alloc};
  }
};

}  // namespace

Result bruteForceOptimum(const Instance& inst, const BlockCatalog& cat, const TinyBounds& bounds) {
  auto refuse = [](const std::string& what) { throw Refused("instance exceeds oracle bounds: " + what); };
  if (int(inst.terminals.size()) > bounds.maxTerminals) refuse("terminals");
  if (int(inst.services.size()) > bounds.maxServices) refuse("services");
  if (int(cat.blocks.size()) > bounds.maxBlocks) refuse("blocks");
  int volume = 0;
  for (const Demand& d : inst.demands) volume += d.volume;
  if (volume > bounds.maxTotalVolume) refuse("total volume");
  for (const RailcarType& r : inst.railcars)
    if (!r.fleetLimit || *r.fleetLimit > bounds.maxFleetPerType) refuse("fleet of " + r.id);
  int extras = 0;
  for (const TrainService& s : inst.services) extras += s.isExtra();
  if (extras > bounds.maxExtras) refuse("extra services");
  return Search(inst, cat).run();
}

}  // namespace railplan::oracle
