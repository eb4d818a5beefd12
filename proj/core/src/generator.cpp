#include "railplan/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "railplan/network.hpp"

namespace railplan {

namespace {

// Hand-rolled draws so instances are identical across standard libraries.
double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
std::int64_t uniformInt(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace

const std::vector<FleetScenario>& fleetScenarios() {
  static const std::vector<FleetScenario> s{
      {1, "1x53", {"1x53"}},
      {2, "1x40,1x53", {"1x40", "1x53"}},
      {3, "3x53", {"3x53"}},
      {4, "3x40,3x53", {"3x40", "3x53"}},
      {5, "5x53", {"5x53"}},
      {6, "5x40,5x53", {"5x40", "5x53"}},
      {7, "All", {"1x40", "1x53", "3x40", "3x53", "5x40", "5x53"}},
  };
  return s;
}

const FleetScenario& fleetScenario(int id) {
  if (id < 1 || id > 7) throw std::out_of_range("fleet scenario must be in 1..7, got " + std::to_string(id));
  return fleetScenarios()[id - 1];
}

std::vector<RailcarType> standardRailcars() {
  using P = PlatformType;
  return {
      {"1x40", P::P40, 1, 56, std::nullopt},  {"1x53", P::P53, 1, 70, std::nullopt},
      {"3x40", P::P40, 3, 150, std::nullopt}, {"3x53", P::P53, 3, 195, std::nullopt},
      {"5x40", P::P40, 5, 240, std::nullopt}, {"5x53", P::P53, 5, 315, std::nullopt},
  };
}

int split40(int volume, double share40) {
  double x = volume * share40;
  int n = static_cast<int>(std::ceil(x - 0.5));
  return std::clamp(n, 0, volume);
}

GeneratedDemands generateDemands(const Instance& base, const GeneratorSpec& spec) {
  if (spec.share40Min < 0 || spec.share40Max > 1 || spec.share40Min > spec.share40Max)
    throw std::invalid_argument("40-ft share range must lie within [0, 1]");
  if (spec.dueSlackFactor < 0) throw std::invalid_argument("due slack factor must be non-negative");
  Instance noDemands = base;
  noDemands.demands.clear();
  TimeSpaceNetwork net = buildNetwork(noDemands);
  const Minutes T = base.T();

  std::mt19937_64 rng(spec.seed);
  GeneratedDemands out;
  int od = 0;
  for (const OdTotal& t : spec.odTotals) {
    ++od;
    if (t.volume <= 0) throw std::invalid_argument("OD total must be positive");
    double share = spec.share40Min + (spec.share40Max - spec.share40Min) * u01(rng);
    Minutes release = uniformInt(rng, 0, T - 1);
    int n40 = split40(t.volume, share);

    Demand probe;
    probe.origin = t.origin;
    probe.destination = t.destination;
    probe.release = release;
    Minutes sp = shortestPathTime(net, probe);
    Minutes window = T - 1;
    if (sp == kUnreachable) {
      out.warnings.push_back("OD " + base.terminals.at(t.origin).id + "->" + base.terminals.at(t.destination).id +
                             " has no path; demand will only be outsourced");
    } else {
      window = std::min<Minutes>(T - 1, sp + static_cast<Minutes>(std::ceil(spec.dueSlackFactor * sp)));
    }
    for (ContainerType type : kContainerTypes) {
      int v = type == ContainerType::T40 ? n40 : t.volume - n40;
      if (v == 0) continue;
      Demand d = probe;
      d.id = "od" + std::to_string(od) + "-" + toString(type);
      d.due = (release + window) % T;
      d.volume = v;
      d.type = type;
      d.outsourcingCost = t.outsourcingCost;
      out.demands.push_back(d);
    }
  }
  return out;
}

Instance applyFleetScenario(const Instance& inst, int scenarioId) {
  const FleetScenario& sc = fleetScenario(scenarioId);
  auto standard = standardRailcars();
  Instance out = inst;
  out.railcars.clear();
  for (const std::string& id : sc.railcarTypeIds) {
    auto own = std::find_if(inst.railcars.begin(), inst.railcars.end(), [&](const RailcarType& r) { return r.id == id; });
    if (own != inst.railcars.end()) out.railcars.push_back(*own);
    else
      out.railcars.push_back(*std::find_if(standard.begin(), standard.end(), [&](const RailcarType& r) { return r.id == id; }));
  }
  return out;
}

Instance duplicateAsExtras(const Instance& inst) {
  Instance out = inst;
  for (const TrainService& s : inst.services) {
    if (s.isExtra()) continue;
    TrainService x = s;
    x.id = s.id + "-x";
    x.kind = ServiceKind::ExtraCandidate;
    x.minLoadFraction = 0.5;
    x.minLoadLegs.reset();
    std::int64_t capKm = 0;
    for (const Leg& l : s.legs) capKm += static_cast<std::int64_t>(l.capacity) * l.distance;
    x.fixedCost = inst.costs.fix + inst.costs.var * capKm;
    out.services.push_back(std::move(x));
  }
  return out;
}

Instance withoutExtras(const Instance& inst) {
  Instance out = inst;
  std::erase_if(out.services, [](const TrainService& s) { return s.isExtra(); });
  return out;
}

Instance generateSyntheticNetwork(const SizeParams& p, std::uint64_t seed) {
  if (p.terminals < 2) throw std::invalid_argument("synthetic network needs at least 2 terminals");
  if (p.services < 1) throw std::invalid_argument("synthetic network needs at least 1 service");
  if (p.legsPerService < 1) throw std::invalid_argument("services need at least 1 leg");
  if (p.capacityMin <= 0 || p.capacityMin > p.capacityMax) throw std::invalid_argument("bad capacity range");
  if (p.distanceMin <= 0 || p.distanceMin > p.distanceMax) throw std::invalid_argument("bad distance range");
  if (p.regions < 1) throw std::invalid_argument("need at least 1 region");

  std::mt19937_64 rng(seed);
  Instance inst;
  inst.config.transferTime = p.transferTime;
  inst.railcars = standardRailcars();
  const int n = p.terminals;
  for (int i = 0; i < n; ++i)
    inst.terminals.push_back({"T" + std::to_string(i + 1), "Terminal " + std::to_string(i + 1),
                              "R" + std::to_string(i * std::min(p.regions, n) / n + 1)});

  std::vector<std::vector<int>> dist(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = static_cast<int>(uniformInt(rng, p.distanceMin, p.distanceMax));

  const Minutes T = inst.T();
  const int legs = std::min(p.legsPerService, n - 1);
  constexpr Minutes kDwell = 60;
  for (int s = 0; s < p.services; ++s) {
    const int start = s % n;
    const int dir = (s / n) % 2 == 0 ? 1 : -1;
    TrainService svc;
    svc.id = "S" + std::to_string(s + 1);
    Minutes clock = (s % 7) * 1440 + uniformInt(rng, 0, 1439);
    int here = start;
    svc.stops.push_back({here, std::nullopt, clock % T});
    for (int l = 0; l < legs; ++l) {
      int next = ((here + dir) % n + n) % n;
      int d = dist[here][next];
      int cap = static_cast<int>(uniformInt(rng, p.capacityMin / 10, p.capacityMax / 10)) * 10;
      svc.legs.push_back({cap, d});
      clock += d;  // 60 km/h
      Stop st{next, clock % T, std::nullopt};
      if (l + 1 < legs) {
        clock += kDwell;
        st.departure = clock % T;
      }
      svc.stops.push_back(st);
      here = next;
    }
    inst.services.push_back(std::move(svc));
  }
  return inst;
}

Instance generateDeskInstance(const DeskParams& p, std::uint64_t seed, std::vector<std::string>* warnings) {
  Instance inst = generateSyntheticNetwork(p.size, seed);
  TimeSpaceNetwork net = buildNetwork(inst);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<std::pair<int, int>> pairs;
  const int n = static_cast<int>(inst.terminals.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) pairs.emplace_back(i, j);
  for (std::size_t i = pairs.size(); i > 1; --i) std::swap(pairs[i - 1], pairs[uniformInt(rng, 0, i - 1)]);

  GeneratorSpec spec;
  spec.seed = rng();
  spec.share40Min = p.share40Min;
  spec.share40Max = p.share40Max;
  spec.dueSlackFactor = p.dueSlackFactor;
  for (auto [o, d] : pairs) {
    if (static_cast<int>(spec.odTotals.size()) == p.odPairs) break;
    Demand probe;
    probe.origin = o;
    probe.destination = d;
    if (shortestPathTime(net, probe) == kUnreachable) continue;
    spec.odTotals.push_back({o, d, static_cast<int>(uniformInt(rng, p.volumeMin, p.volumeMax))});
  }
  std::vector<std::string> warn;
  if (static_cast<int>(spec.odTotals.size()) < p.odPairs)
    warn.push_back("only " + std::to_string(spec.odTotals.size()) + " reachable OD pairs");
  GeneratedDemands g = generateDemands(inst, spec);
  inst.demands = std::move(g.demands);
  warn.insert(warn.end(), g.warnings.begin(), g.warnings.end());
  if (warnings) *warnings = std::move(warn);
  return inst;
}

std::vector<AsymmetryEntry> demandAsymmetry(const Instance& inst) {
  std::map<std::pair<int, int>, int> vol;
  for (const Demand& d : inst.demands) vol[{d.origin, d.destination}] += d.volume;
  std::map<std::pair<int, int>, AsymmetryEntry> acc;
  for (auto [od, v] : vol) {
    auto [o, d] = od;
    auto key = std::minmax(o, d);
    auto& e = acc[{key.first, key.second}];
    e.a = key.first;
    e.b = key.second;
    (o == key.first ? e.forward : e.backward) += v;
  }
  std::vector<AsymmetryEntry> out;
  for (auto& [k, e] : acc) {
    e.percent = 100.0 * std::abs(e.forward - e.backward) / std::max(e.forward, e.backward);
    out.push_back(e);
  }
  return out;
}

std::string manifestJson(const std::vector<ManifestEntry>& entries) {
  nlohmann::ordered_json doc;
  doc["instances"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json o;
    o["file"] = e.file;
    o["seed"] = e.seed;
    o["spec"] = e.spec.empty() ? nlohmann::ordered_json::object() : nlohmann::ordered_json::parse(e.spec);
    o["sha256"] = e.sha256;
    doc["instances"].push_back(std::move(o));
  }
  return doc.dump(2) + "\n";
}

}  // namespace railplan
