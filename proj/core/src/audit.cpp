#include "railplan/audit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

namespace railplan {

using milp::VarKey;
using milp::VarKind;

PlanSolution makePlanSolution(const BuiltModel& built, const milp::SolveResult& r) {
  PlanSolution s;
  s.formulation = built.formulation;
  s.values = r.values;
  s.objective = r.objective;
  s.gap = r.gap;
  s.totalTime = r.wallTime;
  s.instanceFingerprint = built.instanceFingerprint;
  return s;
}

std::string AuditReport::toJson() const {
  nlohmann::ordered_json o;
  o["ok"] = ok();
  o["objective"] = objective;
  o["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : violations)
    o["violations"].push_back({{"family", v.family}, {"row", v.row}, {"magnitude", v.magnitude}, {"message", v.message}});
  o["fleetTotals"] = fleetTotals;
  o["inventory"] = nlohmann::ordered_json::array();
  for (const auto& t : inventory)
    o["inventory"].push_back({{"railcar", t.railcar}, {"terminal", t.terminal}, {"start", t.start},
                              {"minimum", t.minimum}, {"end", t.end}, {"levels", t.levels}});
  return o.dump(2) + "\n";
}

namespace {

class Auditor {
 public:
  Auditor(const PlanSolution& sol, const BuiltModel& built, const Instance& inst, const BlockCatalog& cat,
          const TimeSpaceNetwork& net)
      : sol_(sol), built_(built), inst_(inst), cat_(cat), net_(net), f_(sol.formulation) {}

  AuditReport run() {
    if (sol_.values.size() != built_.registry.size()) {
      flag("bounds", "solution", std::abs(double(sol_.values.size()) - double(built_.registry.size())),
           "solution does not cover the registry");
      return std::move(rep_);
    }
    checkColumns();
    recomputeBlocks();
    checkDemand();
    if (f_ != Formulation::UnrestrictedLoading) checkLoading();
    checkLengths();
    if (f_ == Formulation::SsndRm) checkInventory();
    checkCapacity();
    checkObjective();
    return std::move(rep_);
  }

 private:
  const PlanSolution& sol_;
  const BuiltModel& built_;
  const Instance& inst_;
  const BlockCatalog& cat_;
  const TimeSpaceNetwork& net_;
  Formulation f_;
  AuditReport rep_;
  std::vector<BlockPath> blocks_;  // recomputed from legs

  double get(VarKind k, int a, int b = -1, int c = -1, int d = -1) const {
    auto col = built_.registry.find(VarKey{k, {a, b, c, d}});
    return col ? sol_.values[*col] : 0.0;
  }
  void flag(std::string family, std::string row, double mag, std::string msg) {
    rep_.violations.push_back({std::move(family), std::move(row), mag, std::move(msg)});
  }
  static std::string s(int v) { return std::to_string(v); }

  void checkColumns() {
    for (std::size_t j = 0; j < sol_.values.size(); ++j) {
      const auto& var = built_.model.variable(static_cast<int>(j));
      double v = sol_.values[j];
      if (!std::isfinite(v)) {
        flag("bounds", var.name, milp::kInf, "non-finite value");
        continue;
      }
      if (v < var.lower - kAuditTolerance || v > var.upper + kAuditTolerance)
        flag("bounds", var.name, std::max(var.lower - v, v - var.upper), "value outside bounds");
      if (std::abs(v - std::round(v)) > kAuditTolerance)
        flag("integrality", var.name, std::abs(v - std::round(v)), "integer variable is fractional");
    }
    for (std::size_t s = 0; s < inst_.services.size(); ++s) {
      double v = get(VarKind::ExtraService, int(s));
      if (inst_.services[s].isExtra() && v > 1 + kAuditTolerance) flag("bounds", "s_" + std::to_string(s), v - 1, "s above 1");
    }
  }

  void recomputeBlocks() {
    for (const BlockPath& b : cat_.blocks) {
      BlockPath r;
      r.id = b.id;
      r.legs = b.legs;
      blocks_.push_back(computeAttributes(r, inst_));
      double y = get(VarKind::BlockSelect, b.id);
      if (y > 1 + kAuditTolerance) flag("bounds", "y_" + s(b.id), y - 1, "y above 1");
    }
  }

  void checkDemand() {
    for (std::size_t k = 0; k < inst_.demands.size(); ++k) {
      const Demand& d = inst_.demands[k];
      double cover = get(VarKind::Unmet, int(k));
      for (const CompatibleBlock& kb : cat_.demandBlocks[k]) {
        double z = get(VarKind::BlockFlow, kb.block, int(k));
        cover += z;
        const BlockPath& b = blocks_[kb.block];
        double over = z - d.volume * get(VarKind::BlockSelect, kb.block);
        if (over > kAuditTolerance)
          flag(toString(RowFamily::FlowLink), "flow_link_b" + s(kb.block) + "_k" + s(int(k)), over,
               "flow on a block that is not built");
        if (z > kAuditTolerance && (b.origin != d.origin || b.destination != d.destination))
          flag(toString(RowFamily::FlowLink), "flow_link_b" + s(kb.block) + "_k" + s(int(k)), z,
               "block ends differ from the demand ends");
      }
      if (std::abs(cover - d.volume) > kAuditTolerance)
        flag(toString(RowFamily::DemandCover), "demand_cover_k" + s(int(k)), std::abs(cover - d.volume),
             "demand volume not covered exactly");
    }
  }

  double carried(int b, ContainerType t) const {
    double n = 0;
    for (int k : cat_.blockDemands[b])
      if (inst_.demands[k].type == t) n += get(VarKind::BlockFlow, b, k);
    return n;
  }
  double single(ContainerType t, PlatformType p, int b) const {
    return get(VarKind::SinglePlatform, index(t), index(p), b);
  }
  double pair(ContainerType a, ContainerType c, PlatformType p, int b) const {
    if (index(a) > index(c)) std::swap(a, c);
    return get(VarKind::PairPlatform, index(a), index(c), index(p), b);
  }

  void checkLoading() {
    using C = ContainerType;
    using P = PlatformType;
    for (const BlockPath& b : blocks_) {
      const int id = b.id;
      // forbidden patterns: a 53 alone or paired with a 53 on P40
      double bad = single(C::T53, P::P40, id) + pair(C::T53, C::T53, P::P40, id);
      if (bad > kAuditTolerance)
        flag(toString(RowFamily::LoadCount), "load_count_b" + s(id), bad, "53-ft container on a 40-ft bottom slot");
      for (C t : kContainerTypes) {
        double slots = 0;
        for (P p : kPlatformTypes) {
          slots += single(t, p, id);
          for (C u : kContainerTypes) slots += (t == u ? 2.0 : 1.0) * pair(t, u, p, id);
        }
        double diff = carried(id, t) - slots;
        if (std::abs(diff) > kAuditTolerance)
          flag(toString(RowFamily::LoadCount), std::string("load_count_b") + s(id) + "_" + toString(t), std::abs(diff),
               "containers do not match platform assignments");
      }
      for (P p : kPlatformTypes) {
        double used = single(C::T40, p, id) + single(C::T53, p, id) + pair(C::T40, C::T40, p, id) +
                      pair(C::T40, C::T53, p, id) + pair(C::T53, C::T53, p, id);
        double platforms = 0, cars = 0;
        for (std::size_t g = 0; g < inst_.railcars.size(); ++g)
          if (inst_.railcars[g].platform == p) {
            double x = get(VarKind::LoadedCars, int(g), id);
            platforms += inst_.railcars[g].platformCount * x;
            cars += x;
          }
        std::string tag = std::string("_b") + s(id) + "_" + toString(p);
        if (used > platforms + kAuditTolerance)
          flag(toString(RowFamily::PlatformUpper), "platform_upper" + tag, used - platforms,
               "more loaded platforms than the loaded cars provide");
        if (cars > used + kAuditTolerance)
          flag(toString(RowFamily::PlatformLower), "platform_lower" + tag, cars - used, "a loaded car carries nothing");
      }
      double mixed = pair(C::T40, C::T53, P::P40, id);
      double cap = 0;
      for (std::size_t g = 0; g < inst_.railcars.size(); ++g) {
        const RailcarType& car = inst_.railcars[g];
        if (car.platform == P::P40) cap += (car.platformCount + 1) / 2 * get(VarKind::LoadedCars, int(g), id);
      }
      if (mixed > cap + kAuditTolerance)
        flag(toString(RowFamily::MixedTop53), "mixed_top53_b" + s(id), mixed - cap,
             "too many 53-ft top slots on 40-ft cars");
    }
  }

  double blockLength(int b) const {
    if (f_ == Formulation::UnrestrictedLoading) {
      double len = 0;
      for (int k : cat_.blockDemands[b]) len += containerLength(inst_.demands[k].type) / 2.0 * get(VarKind::BlockFlow, b, k);
      return len;
    }
    double len = 0;
    for (std::size_t g = 0; g < inst_.railcars.size(); ++g) {
      double cars = get(VarKind::LoadedCars, int(g), b);
      if (f_ == Formulation::SsndRm) cars += get(VarKind::EmptyCars, int(g), b);
      len += inst_.railcars[g].length * cars;
    }
    return len;
  }

  void checkLengths() {
    for (const BlockPath& b : blocks_) {
      double over = blockLength(b.id) - b.capacity * get(VarKind::BlockSelect, b.id);
      if (over > kAuditTolerance)
        flag(toString(RowFamily::BlockLength), "block_length_b" + s(b.id), over, "block longer than its capacity");
    }
  }

  // Pool node of the block's first departure and last arrival.
  int poolNode(int terminal, NodeKind kind, int service, int stop) const {
    for (int id : net_.terminals[terminal].poolSequence) {
      const EventNode& n = net_.node(id);
      if (n.kind == kind && n.service == service && n.stop == stop) return id;
    }
    return -1;
  }

  void checkInventory() {
    const int nT = static_cast<int>(inst_.terminals.size());
    std::map<int, std::vector<int>> leaving, entering;  // pool node -> blocks
    for (const BlockPath& b : blocks_) {
      LegRef first = b.legs.front(), last = b.legs.back();
      leaving[poolNode(b.origin, NodeKind::PoolMinus, first.service, first.leg)].push_back(b.id);
      entering[poolNode(b.destination, NodeKind::PoolPlus, last.service, last.leg + 1)].push_back(b.id);
    }
    for (std::size_t g = 0; g < inst_.railcars.size(); ++g) {
      long long fleet = 0;
      auto cars = [&](int b) {
        return std::llround(get(VarKind::LoadedCars, int(g), b) + get(VarKind::EmptyCars, int(g), b));
      };
      for (int t = 0; t < nT; ++t) {
        const auto& pool = net_.terminals[t].poolSequence;
        long long alloc = std::llround(get(VarKind::Allocation, int(g), t));
        fleet += alloc;
        if (pool.empty()) continue;
        long long inTransit = 0;
        for (const BlockPath& b : blocks_)
          if (b.origin == t && b.departure > b.arrival) inTransit += cars(b.id);
        InventoryTrace tr{int(g), t, alloc - inTransit, alloc - inTransit, 0, {}};
        std::string tag = "_g" + s(int(g)) + "_t" + s(t);
        if (tr.start < 0)
          flag(toString(RowFamily::Allocation), "allocation" + tag, double(-tr.start),
               "allocation smaller than cars in transit at the cycle start");
        long long level = tr.start;
        for (std::size_t p = 0; p < pool.size(); ++p) {
          for (int b : entering[pool[p]]) level += cars(b);
          for (int b : leaving[pool[p]]) level -= cars(b);
          tr.levels.push_back(level);
          tr.minimum = std::min(tr.minimum, level);
          double reported = get(VarKind::PoolInventory, int(g), t, int(p));
          if (std::abs(reported - double(level)) > kAuditTolerance)
            flag(toString(RowFamily::PoolBalance), "pool_balance" + tag + "_i" + s(int(p)),
                 std::abs(reported - double(level)), "pool inventory does not follow the car movements");
        }
        tr.end = level;
        if (tr.minimum < 0)
          flag("inventory", "inventory" + tag, double(-tr.minimum), "railcar inventory goes negative");
        if (tr.end != tr.start)
          flag("inventory", "inventory" + tag, double(std::llabs(tr.end - tr.start)),
               "railcar inventory is not periodic over the cycle");
        rep_.inventory.push_back(std::move(tr));
      }
      rep_.fleetTotals.push_back(fleet);
      const auto& lim = inst_.railcars[g].fleetLimit;
      if (lim && fleet > *lim)
        flag(toString(RowFamily::FleetCap), "fleet_cap_g" + s(int(g)), double(fleet - *lim), "fleet limit exceeded");
    }
  }

  void checkCapacity() {
    std::map<std::pair<int, int>, double> load;
    for (const BlockPath& b : blocks_) {
      double len = blockLength(b.id);
      if (len == 0) continue;
      for (const LegRef& r : b.legs) load[{r.service, r.leg}] += len;
    }
    for (std::size_t si = 0; si < inst_.services.size(); ++si) {
      const TrainService& svc = inst_.services[si];
      std::vector<int> thr = svc.thresholdLegs();
      double sv = svc.isExtra() ? get(VarKind::ExtraService, int(si)) : 1.0;
      for (std::size_t l = 0; l < svc.legs.size(); ++l) {
        int arc = net_.movingArcs[si][l];
        double used = load[{int(si), int(l)}];
        double u = svc.legs[l].capacity;
        RowFamily fam = svc.isExtra() ? RowFamily::ExtraCapacity : RowFamily::RegularCapacity;
        if (used > u * sv + kAuditTolerance)
          flag(toString(fam), std::string(toString(fam)) + "_a" + s(arc), used - u * sv,
               svc.isExtra() && sv < 0.5 ? "load on an extra train that does not run" : "leg capacity exceeded");
        if (svc.isExtra() && std::find(thr.begin(), thr.end(), int(l)) != thr.end()) {
          double need = svc.minLoadFraction * u * sv;
          if (used < need - kAuditTolerance)
            flag(toString(RowFamily::ExtraMinLoad), "extra_min_load_a" + s(arc), need - used,
                 "extra train below its minimum load");
        }
      }
    }
  }

  void checkObjective() {
    const CostParams& c = inst_.costs;
    double total = 0;
    for (std::size_t si = 0; si < inst_.services.size(); ++si) {
      const TrainService& svc = inst_.services[si];
      if (!svc.isExtra()) continue;
      Money f = svc.fixedCost ? *svc.fixedCost : c.fix;
      if (!svc.fixedCost)
        for (const Leg& l : svc.legs) f += c.var * (static_cast<std::int64_t>(l.capacity) * l.distance);
      total += f.toDouble() * get(VarKind::ExtraService, int(si));
    }
    for (const BlockPath& b : blocks_) {
      total += (c.build + c.trans * b.transfers).toDouble() * get(VarKind::BlockSelect, b.id);
      Money move = c.wait * b.transferWait + c.bord * b.borderCrossings + c.km * b.distance;
      for (int k : cat_.blockDemands[b.id]) {
        const Demand& d = inst_.demands[k];
        Minutes sp = shortestPathTime(net_, d);
        Minutes wait = cyclicDuration(d.release, b.departure, inst_.T());
        Minutes late = sp == kUnreachable ? 0 : std::max<Minutes>(0, wait + b.duration - sp);
        total += (move + c.late * late).toDouble() * get(VarKind::BlockFlow, b.id, k);
      }
      if (f_ == Formulation::SsndRm)
        for (std::size_t g = 0; g < inst_.railcars.size(); ++g)
          total += move.toDouble() * get(VarKind::EmptyCars, int(g), b.id);
    }
    for (std::size_t k = 0; k < inst_.demands.size(); ++k)
      total += inst_.demands[k].outsourcingCost.toDouble() * get(VarKind::Unmet, int(k));
    if (f_ == Formulation::SsndRm)
      for (std::size_t g = 0; g < inst_.railcars.size(); ++g)
        for (std::size_t t = 0; t < inst_.terminals.size(); ++t)
          total += (c.alloc * inst_.railcars[g].platformCount).toDouble() * get(VarKind::Allocation, int(g), int(t));
    rep_.objective = total;
    double tol = kAuditTolerance * std::max(1.0, std::abs(total));
    if (std::abs(total - sol_.objective) > tol)
      flag("objective", "objective", std::abs(total - sol_.objective), "reported objective differs from the plan cost");
  }
};

}  // namespace

AuditReport auditSolution(const PlanSolution& sol, const BuiltModel& built, const Instance& inst,
                          const BlockCatalog& cat, const TimeSpaceNetwork& net) {
  return Auditor(sol, built, inst, cat, net).run();
}

}  // namespace railplan
