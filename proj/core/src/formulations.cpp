#include "railplan/formulations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "railplan/fingerprint.hpp"
#include "railplan/instance_io.hpp"

namespace railplan {

using milp::Constraint;
using milp::Sense;
using milp::Term;
using milp::VarKey;
using milp::VarKind;
using milp::Variable;

const char* toString(Formulation f) {
  switch (f) {
    case Formulation::SsndRm: return "ssndrm";
    case Formulation::UnrestrictedFleet: return "uf";
    case Formulation::UnrestrictedLoading: return "ul";
  }
  return "?";
}

Formulation parseFormulation(const std::string& s) {
  if (s == "ssndrm" || s == "ssnd-rm") return Formulation::SsndRm;
  if (s == "uf" || s == "unrestricted-fleet") return Formulation::UnrestrictedFleet;
  if (s == "ul" || s == "unrestricted-loading") return Formulation::UnrestrictedLoading;
  throw std::invalid_argument("unknown formulation '" + s + "'");
}

const char* toString(RowFamily f) {
  switch (f) {
    case RowFamily::DemandCover: return "demand_cover";
    case RowFamily::FlowLink: return "flow_link";
    case RowFamily::LoadCount: return "load_count";
    case RowFamily::PlatformUpper: return "platform_upper";
    case RowFamily::PlatformLower: return "platform_lower";
    case RowFamily::MixedTop53: return "mixed_top53";
    case RowFamily::BlockLength: return "block_length";
    case RowFamily::PoolBalance: return "pool_balance";
    case RowFamily::Allocation: return "allocation";
    case RowFamily::FleetCap: return "fleet_cap";
    case RowFamily::RegularCapacity: return "regular_capacity";
    case RowFamily::ExtraCapacity: return "extra_capacity";
    case RowFamily::ExtraMinLoad: return "extra_min_load";
  }
  return "?";
}

std::vector<LoadPattern> loadPatterns() {
  using C = ContainerType;
  using P = PlatformType;
  return {
      {P::P40, C::T40, std::nullopt}, {P::P53, C::T40, std::nullopt}, {P::P53, C::T53, std::nullopt},
      {P::P40, C::T40, C::T40},       {P::P40, C::T40, C::T53},       {P::P53, C::T40, C::T40},
      {P::P53, C::T40, C::T53},       {P::P53, C::T53, C::T53},
  };
}

std::string BuiltModel::explainJson() const {
  nlohmann::ordered_json o;
  o["formulation"] = toString(formulation);
  o["rows"] = nlohmann::ordered_json::object();
  for (const auto& r : model.constraints()) o["rows"][r.name] = r.family;
  return o.dump(1) + "\n";
}

std::string instanceFingerprint(const Instance& inst) { return sha256Hex(saveInstance(inst)); }
std::string catalogFingerprint(const Instance& inst, const BlockCatalog& cat) {
  return sha256Hex(cat.toJsonLines(inst));
}

Money extraServiceCost(const TrainService& svc, const CostParams& c) {
  if (svc.fixedCost) return *svc.fixedCost;
  std::int64_t capKm = 0;
  for (const Leg& l : svc.legs) capKm += static_cast<std::int64_t>(l.capacity) * l.distance;
  return c.fix + c.var * capKm;
}

Money emptyCarCost(const BlockPath& b, const CostParams& c) {
  return c.wait * b.transferWait + c.bord * b.borderCrossings + c.km * b.distance;
}

Money blockFlowCost(const BlockPath& b, const CompatibleBlock& kb, const CostParams& c) {
  return emptyCarCost(b, c) + c.late * kb.lateness;
}

Money allocationCost(const RailcarType& car, const CostParams& c) { return c.alloc * car.platformCount; }

int mixedPairCapacity(const RailcarType& car) {
  return car.platform == PlatformType::P40 ? (car.platformCount + 1) / 2 : 0;
}

namespace {

void requireIndexes(const Instance& inst, const BlockCatalog& cat, const TimeSpaceNetwork& net) {
  auto need = [](bool ok, const char* name) {
    if (!ok) throw std::invalid_argument(std::string("catalog index set ") + name + " is missing");
  };
  need(cat.demandBlocks.size() == inst.demands.size(), "B_k");
  need(cat.blockDemands.size() == cat.blocks.size(), "K_b");
  need(cat.arcBlocks.size() == net.arcs.size(), "B_a");
  need(cat.poolDepartures.size() == net.nodes.size(), "B+ (pool departures)");
  need(cat.poolArrivals.size() == net.nodes.size(), "B- (pool arrivals)");
  need(cat.formedAt.size() == inst.terminals.size(), "B+_theta");
  need(cat.wrapFormedAt.size() == inst.terminals.size(), "wraparound blocks");
  need(net.terminals.size() == inst.terminals.size(), "terminal events");
}

class Assembler {
 public:
  Assembler(const Instance& inst, const BlockCatalog& cat, const TimeSpaceNetwork& net, Formulation f)
      : inst_(inst), cat_(cat), net_(net) {
    requireIndexes(inst, cat, net);
    out_.formulation = f;
    out_.model.name = toString(f);
    out_.instanceFingerprint = instanceFingerprint(inst);
    out_.catalogFingerprint = catalogFingerprint(inst, cat);
  }

  BuiltModel build() {
    const Formulation f = out_.formulation;
    const bool cars = f != Formulation::UnrestrictedLoading;
    const bool fleet = f == Formulation::SsndRm;
    addDesignAndFlow();
    if (cars) addCarsAndPlatforms(fleet);
    if (fleet) addFleet();
    addDemandRows();
    if (cars) addLoadingRows();
    addLengthRows(f);
    if (fleet) addPoolRows();
    addCapacityRows(f);
    return std::move(out_);
  }

 private:
  const Instance& inst_;
  const BlockCatalog& cat_;
  const TimeSpaceNetwork& net_;
  BuiltModel out_;

  int col(VarKey key, std::string name, double lo, double up, bool integer, double obj) {
    int id = out_.model.addVariable({std::move(name), lo, up, integer, obj});
    out_.registry.add(key, id);
    return id;
  }
  std::optional<int> find(VarKind k, int a, int b = -1, int c = -1, int d = -1) const {
    return out_.registry.find({k, {a, b, c, d}});
  }
  void row(RowFamily fam, std::string name, std::vector<Term> terms, Sense sense, double rhs) {
    out_.model.addConstraint({std::move(name), toString(fam), std::move(terms), sense, rhs});
  }
  static std::string n(std::initializer_list<std::string> parts) {
    std::string s;
    for (const auto& p : parts) s += (s.empty() ? "" : "_") + p;
    return s;
  }
  static std::string i(int v) { return std::to_string(v); }

  bool carriesDemand(int b) const { return !cat_.blockDemands[b].empty(); }
  std::optional<double> fleetLimit(int g) const {
    const auto& lim = inst_.railcars[g].fleetLimit;
    return lim ? std::optional<double>(*lim) : std::nullopt;
  }

  void addDesignAndFlow() {
    const CostParams& c = inst_.costs;
    for (std::size_t s = 0; s < inst_.services.size(); ++s)
      if (inst_.services[s].isExtra())
        col({VarKind::ExtraService, {int(s), -1, -1, -1}}, "s_" + i(int(s)), 0, 1, true,
            extraServiceCost(inst_.services[s], c).toDouble());
    for (const BlockPath& b : cat_.blocks)
      col({VarKind::BlockSelect, {b.id, -1, -1, -1}}, "y_" + i(b.id), 0, 1, true, b.buildCost.toDouble());
    for (std::size_t k = 0; k < inst_.demands.size(); ++k) {
      const Demand& d = inst_.demands[k];
      for (const CompatibleBlock& kb : cat_.demandBlocks[k])
        col({VarKind::BlockFlow, {kb.block, int(k), -1, -1}}, n({"z", i(kb.block), i(int(k))}), 0, d.volume, true,
            blockFlowCost(cat_.blocks[kb.block], kb, c).toDouble());
      col({VarKind::Unmet, {int(k), -1, -1, -1}}, "zk_" + i(int(k)), 0, d.volume, true, d.outsourcingCost.toDouble());
    }
  }

  double carBound(const BlockPath& b, int g) const {
    double ub = std::floor(static_cast<double>(b.capacity) / inst_.railcars[g].length);
    if (auto h = fleetLimit(g)) ub = std::min(ub, *h);
    return ub;
  }

  void addCarsAndPlatforms(bool empties) {
    const CostParams& c = inst_.costs;
    for (const BlockPath& b : cat_.blocks) {
      for (std::size_t g = 0; g < inst_.railcars.size(); ++g) {
        double ub = carBound(b, int(g));
        if (carriesDemand(b.id))
          col({VarKind::LoadedCars, {int(g), b.id, -1, -1}}, n({"x", i(int(g)), i(b.id)}), 0, ub, true, 0.0);
        if (empties)
          col({VarKind::EmptyCars, {int(g), b.id, -1, -1}}, n({"w", i(int(g)), i(b.id)}), 0, ub, true,
              emptyCarCost(b, c).toDouble());
      }
      if (!carriesDemand(b.id)) continue;
      for (const LoadPattern& p : loadPatterns()) {
        if (!p.second)
          col({VarKind::SinglePlatform, {index(p.first), index(p.platform), b.id, -1}},
              n({"n1", toString(p.first), toString(p.platform), i(b.id)}), 0, milp::kInf, true, 0.0);
        else
          col({VarKind::PairPlatform, {index(p.first), index(*p.second), index(p.platform), b.id}},
              n({"n2", toString(p.first), toString(*p.second), toString(p.platform), i(b.id)}), 0, milp::kInf, true,
              0.0);
      }
    }
  }

  void addFleet() {
    const CostParams& c = inst_.costs;
    for (std::size_t g = 0; g < inst_.railcars.size(); ++g) {
      double ub = fleetLimit(int(g)).value_or(milp::kInf);
      for (std::size_t t = 0; t < inst_.terminals.size(); ++t) {
        const auto& pool = net_.terminals[t].poolSequence;
        if (pool.empty()) continue;
        col({VarKind::Allocation, {int(g), int(t), -1, -1}}, n({"wa", i(int(g)), i(int(t))}), 0, ub, true,
            allocationCost(inst_.railcars[g], c).toDouble());
        for (std::size_t p = 0; p < pool.size(); ++p)
          col({VarKind::PoolInventory, {int(g), int(t), int(p), -1}}, n({"wp", i(int(g)), i(int(t)), i(int(p))}), 0, ub,
              true, 0.0);
      }
    }
  }

  void addDemandRows() {
    for (std::size_t k = 0; k < inst_.demands.size(); ++k) {
      const Demand& d = inst_.demands[k];
      std::vector<Term> cover;
      for (const CompatibleBlock& kb : cat_.demandBlocks[k]) {
        int z = *find(VarKind::BlockFlow, kb.block, int(k));
        cover.push_back({z, 1.0});
        int y = *find(VarKind::BlockSelect, kb.block);
        row(RowFamily::FlowLink, n({"flow_link", "b" + i(kb.block), "k" + i(int(k))}), {{z, 1.0}, {y, -double(d.volume)}},
            Sense::LessEqual, 0.0);
      }
      cover.push_back({*find(VarKind::Unmet, int(k)), 1.0});
      row(RowFamily::DemandCover, n({"demand_cover", "k" + i(int(k))}), std::move(cover), Sense::Equal, double(d.volume));
    }
  }

  int single(ContainerType t, PlatformType p, int b) const { return find(VarKind::SinglePlatform, index(t), index(p), b).value_or(-1); }
  int pair(ContainerType a, ContainerType c, PlatformType p, int b) const {
    if (index(a) > index(c)) std::swap(a, c);
    return find(VarKind::PairPlatform, index(a), index(c), index(p), b).value_or(-1);
  }

  void addLoadingRows() {
    for (const BlockPath& b : cat_.blocks) {
      if (!carriesDemand(b.id)) continue;
      // containers per type = platforms carrying that type
      for (ContainerType t : kContainerTypes) {
        std::vector<Term> terms;
        for (int k : cat_.blockDemands[b.id])
          if (inst_.demands[k].type == t) terms.push_back({*find(VarKind::BlockFlow, b.id, k), 1.0});
        for (PlatformType p : kPlatformTypes) {
          if (int v = single(t, p, b.id); v >= 0) terms.push_back({v, -1.0});
          for (ContainerType u : kContainerTypes) {
            int v = pair(t, u, p, b.id);
            if (v >= 0) terms.push_back({v, t == u ? -2.0 : -1.0});
          }
        }
        row(RowFamily::LoadCount, n({"load_count", "b" + i(b.id), toString(t)}), std::move(terms), Sense::Equal, 0.0);
      }
      for (PlatformType p : kPlatformTypes) {
        std::vector<Term> used;  // platforms of type p in use
        for (const LoadPattern& lp : loadPatterns()) {
          if (lp.platform != p) continue;
          int v = lp.second ? pair(lp.first, *lp.second, p, b.id) : single(lp.first, p, b.id);
          used.push_back({v, 1.0});
        }
        std::vector<Term> upper = used, lower = used;
        for (auto& t : upper) t.coef = -1.0;
        for (std::size_t g = 0; g < inst_.railcars.size(); ++g) {
          const RailcarType& car = inst_.railcars[g];
          int x = *find(VarKind::LoadedCars, int(g), b.id);
          if (car.platform == p) {
            upper.push_back({x, double(car.platformCount)});
            lower.push_back({x, -1.0});
          }
        }
        row(RowFamily::PlatformUpper, n({"platform_upper", "b" + i(b.id), toString(p)}), std::move(upper),
            Sense::GreaterEqual, 0.0);
        row(RowFamily::PlatformLower, n({"platform_lower", "b" + i(b.id), toString(p)}), std::move(lower),
            Sense::GreaterEqual, 0.0);
      }
      int mixed = pair(ContainerType::T40, ContainerType::T53, PlatformType::P40, b.id);
      if (mixed >= 0) {
        std::vector<Term> t{{mixed, -1.0}};
        for (std::size_t g = 0; g < inst_.railcars.size(); ++g)
          if (int cap = mixedPairCapacity(inst_.railcars[g]); cap > 0)
            t.push_back({*find(VarKind::LoadedCars, int(g), b.id), double(cap)});
        row(RowFamily::MixedTop53, n({"mixed_top53", "b" + i(b.id)}), std::move(t), Sense::GreaterEqual, 0.0);
      }
    }
  }

  // Train length charged to block b by this formulation.
  std::vector<Term> lengthTerms(Formulation f, int b) const {
    std::vector<Term> terms;
    if (f == Formulation::UnrestrictedLoading) {
      for (int k : cat_.blockDemands[b])
        terms.push_back({*find(VarKind::BlockFlow, b, k), containerLength(inst_.demands[k].type) / 2.0});
      return terms;
    }
    for (std::size_t g = 0; g < inst_.railcars.size(); ++g) {
      double len = inst_.railcars[g].length;
      if (auto x = find(VarKind::LoadedCars, int(g), b)) terms.push_back({*x, len});
      if (f == Formulation::SsndRm)
        if (auto w = find(VarKind::EmptyCars, int(g), b)) terms.push_back({*w, len});
    }
    return terms;
  }

  void addLengthRows(Formulation f) {
    for (const BlockPath& b : cat_.blocks) {
      auto terms = lengthTerms(f, b.id);
      if (terms.empty()) continue;
      terms.push_back({*find(VarKind::BlockSelect, b.id), -double(b.capacity)});
      row(RowFamily::BlockLength, n({"block_length", "b" + i(b.id)}), std::move(terms), Sense::LessEqual, 0.0);
    }
  }

  void addCars(std::vector<Term>& terms, int g, int b, double sign) const {
    if (auto x = find(VarKind::LoadedCars, g, b)) terms.push_back({*x, sign});
    if (auto w = find(VarKind::EmptyCars, g, b)) terms.push_back({*w, sign});
  }

  void addPoolRows() {
    for (std::size_t g = 0; g < inst_.railcars.size(); ++g) {
      std::vector<Term> fleet;
      for (std::size_t t = 0; t < inst_.terminals.size(); ++t) {
        const auto& pool = net_.terminals[t].poolSequence;
        if (pool.empty()) continue;
        const int np = static_cast<int>(pool.size());
        for (int p = 0; p < np; ++p) {
          std::vector<Term> terms;
          int prev = *find(VarKind::PoolInventory, int(g), int(t), (p + np - 1) % np);
          int cur = *find(VarKind::PoolInventory, int(g), int(t), p);
          terms.push_back({prev, 1.0});
          terms.push_back({cur, -1.0});
          if (prev == cur) terms.clear();
          for (int b : cat_.poolArrivals[pool[p]]) addCars(terms, int(g), b, 1.0);
          for (int b : cat_.poolDepartures[pool[p]]) addCars(terms, int(g), b, -1.0);
          row(RowFamily::PoolBalance, n({"pool_balance", "g" + i(int(g)), "t" + i(int(t)), "i" + i(p)}), std::move(terms),
              Sense::Equal, 0.0);
        }
        int wa = *find(VarKind::Allocation, int(g), int(t));
        std::vector<Term> alloc{{wa, 1.0}, {*find(VarKind::PoolInventory, int(g), int(t), np - 1), -1.0}};
        for (int b : cat_.wrapFormedAt[t]) addCars(alloc, int(g), b, -1.0);
        row(RowFamily::Allocation, n({"allocation", "g" + i(int(g)), "t" + i(int(t))}), std::move(alloc), Sense::Equal,
            0.0);
        fleet.push_back({wa, 1.0});
      }
      if (auto h = fleetLimit(int(g)); h && !fleet.empty())
        row(RowFamily::FleetCap, n({"fleet_cap", "g" + i(int(g))}), std::move(fleet), Sense::LessEqual, *h);
    }
  }

  void addCapacityRows(Formulation f) {
    for (std::size_t s = 0; s < inst_.services.size(); ++s) {
      const TrainService& svc = inst_.services[s];
      std::vector<int> threshold = svc.thresholdLegs();
      for (std::size_t l = 0; l < svc.legs.size(); ++l) {
        int a = net_.movingArcs[s][l];
        std::vector<Term> load;
        for (int b : cat_.arcBlocks[a]) {
          auto t = lengthTerms(f, b);
          load.insert(load.end(), t.begin(), t.end());
        }
        const double u = svc.legs[l].capacity;
        if (!svc.isExtra()) {
          if (!load.empty())
            row(RowFamily::RegularCapacity, n({"regular_capacity", "a" + i(a)}), std::move(load), Sense::LessEqual, u);
          continue;
        }
        int sv = *find(VarKind::ExtraService, int(s));
        auto cap = load;
        cap.push_back({sv, -u});
        row(RowFamily::ExtraCapacity, n({"extra_capacity", "a" + i(a)}), std::move(cap), Sense::LessEqual, 0.0);
        if (std::find(threshold.begin(), threshold.end(), int(l)) != threshold.end()) {
          auto min = load;
          min.push_back({sv, -svc.minLoadFraction * u});
          row(RowFamily::ExtraMinLoad, n({"extra_min_load", "a" + i(a)}), std::move(min), Sense::GreaterEqual, 0.0);
        }
      }
    }
  }
};

}  // namespace

BuiltModel buildSsndRm(const Instance& inst, const BlockCatalog& cat, const TimeSpaceNetwork& net) {
  return Assembler(inst, cat, net, Formulation::SsndRm).build();
}
BuiltModel buildUnrestrictedFleet(const Instance& inst, const BlockCatalog& cat, const TimeSpaceNetwork& net) {
  return Assembler(inst, cat, net, Formulation::UnrestrictedFleet).build();
}
BuiltModel buildUnrestrictedLoading(const Instance& inst, const BlockCatalog& cat, const TimeSpaceNetwork& net) {
  return Assembler(inst, cat, net, Formulation::UnrestrictedLoading).build();
}
BuiltModel buildFormulation(Formulation f, const Instance& inst, const BlockCatalog& cat, const TimeSpaceNetwork& net) {
  return Assembler(inst, cat, net, f).build();
}

}  // namespace railplan
