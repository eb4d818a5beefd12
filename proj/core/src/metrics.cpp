#include "railplan/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace railplan {

using milp::VarKey;
using milp::VarKind;
using nlohmann::ordered_json;

namespace {

struct View {
  const PlanSolution& sol;
  const BuiltModel& built;
  double operator()(VarKind k, int a, int b = -1, int c = -1, int d = -1) const {
    auto col = built.registry.find(VarKey{k, {a, b, c, d}});
    return col ? sol.values.at(*col) : 0.0;
  }
};

double pct(double num, double den) { return den > 0 ? 100.0 * num / den : 0.0; }

ordered_json optNum(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

}  // namespace

std::string MetricsReport::toJson() const {
  ordered_json o;
  o["formulation"] = toString(formulation);
  o["unsatisfiedDemandPct"] = unsatisfiedDemandPct;
  o["capacityUsage"] = capacityUsage;
  o["usageDiffVsReference"] = usageDiffVsReference;
  o["slotUtilizationPct"] = optNum(slotUtilizationPct);
  o["slotUtilizationLoadedPct"] = optNum(slotUtilizationLoadedPct);
  o["extraTrainCount"] = extraTrainCount;
  o["platformCount"] = platformCount;
  o["railcarCount"] = railcarCount;
  o["pct53Platforms"] = pct53Platforms;
  o["pct1PlatformShare"] = pct1PlatformShare;
  o["pct3PlatformShare"] = pct3PlatformShare;
  o["pct5PlatformShare"] = pct5PlatformShare;
  o["perBlockScatter"] = ordered_json::array();
  for (const auto& r : perBlockScatter)
    o["perBlockScatter"].push_back({{"block", r.block},
                                    {"ratio40Platforms", r.ratio40Platforms},
                                    {"ratio40Containers", r.ratio40Containers},
                                    {"slotUtilization", r.slotUtilization}});
  o["demandAsymmetry"] = ordered_json::array();
  for (const auto& a : demandAsymmetry)
    o["demandAsymmetry"].push_back(
        {{"a", a.a}, {"b", a.b}, {"forward", a.forward}, {"backward", a.backward}, {"percent", a.percent}});
  return o.dump(2) + "\n";
}

MetricsReport computeMetrics(const PlanSolution& sol, const BuiltModel& built, const Instance& inst,
                             const BlockCatalog& cat, const TimeSpaceNetwork& net) {
  (void)net;
  View v{sol, built};
  const Formulation f = sol.formulation;
  MetricsReport m;
  m.formulation = f;

  double unmet = 0, total = 0;
  for (std::size_t k = 0; k < inst.demands.size(); ++k) {
    unmet += v(VarKind::Unmet, int(k));
    total += inst.demands[k].volume;
  }
  m.unsatisfiedDemandPct = pct(unmet, total);

  std::vector<double> running(inst.services.size(), 1.0);
  for (std::size_t s = 0; s < inst.services.size(); ++s)
    if (inst.services[s].isExtra()) {
      running[s] = v(VarKind::ExtraService, int(s));
      m.extraTrainCount += static_cast<int>(std::lround(running[s]));
    }

  const std::size_t G = inst.railcars.size();
  double usedFtKm = 0, slotsAll = 0, slotsLoaded = 0, carried = 0;
  std::vector<double> fleet(G, 0.0);
  for (const BlockPath& b : cat.blocks) {
    double len = 0, c40 = 0, c53 = 0, p40 = 0, pAll = 0, sAll = 0, sLoaded = 0;
    for (int k : cat.blockDemands[b.id]) {
      double z = v(VarKind::BlockFlow, b.id, k);
      (inst.demands[k].type == ContainerType::T40 ? c40 : c53) += z;
      if (f == Formulation::UnrestrictedLoading) len += containerLength(inst.demands[k].type) / 2.0 * z;
    }
    if (f != Formulation::UnrestrictedLoading)
      for (std::size_t g = 0; g < G; ++g) {
        const RailcarType& car = inst.railcars[g];
        double x = v(VarKind::LoadedCars, int(g), b.id);
        double w = f == Formulation::SsndRm ? v(VarKind::EmptyCars, int(g), b.id) : 0.0;
        len += car.length * (x + w);
        sAll += 2.0 * car.platformCount * (x + w);
        sLoaded += 2.0 * car.platformCount * x;
        pAll += car.platformCount * (x + w);
        if (car.platform == PlatformType::P40) p40 += car.platformCount * (x + w);
        if (f == Formulation::UnrestrictedFleet) fleet[g] += x;
      }
    double km = b.distance;
    usedFtKm += len * km;
    slotsAll += sAll;
    slotsLoaded += sLoaded;
    carried += c40 + c53;
    if (f != Formulation::UnrestrictedLoading && v(VarKind::BlockSelect, b.id) > 0.5 && c40 + c53 > 0 && pAll > 0)
      m.perBlockScatter.push_back({b.id, p40 / pAll, c40 / (c40 + c53), (c40 + c53) / sAll});
  }
  double capFtKm = 0;
  for (std::size_t s = 0; s < inst.services.size(); ++s)
    for (const Leg& l : inst.services[s].legs) capFtKm += running[s] * l.capacity * double(l.distance);
  m.capacityUsage = pct(usedFtKm, capFtKm);
  if (f != Formulation::UnrestrictedLoading) {
    m.slotUtilizationPct = pct(carried, slotsAll);
    m.slotUtilizationLoadedPct = pct(carried, slotsLoaded);
  }

  if (f == Formulation::SsndRm)
    for (std::size_t g = 0; g < G; ++g)
      for (std::size_t t = 0; t < inst.terminals.size(); ++t) fleet[g] += v(VarKind::Allocation, int(g), int(t));
  double p53 = 0, byCount[6] = {0, 0, 0, 0, 0, 0};
  for (std::size_t g = 0; g < G; ++g) {
    long long n = std::llround(fleet[g]);
    const RailcarType& car = inst.railcars[g];
    m.railcarCount += n;
    m.platformCount += n * car.platformCount;
    if (car.platform == PlatformType::P53) p53 += double(n) * car.platformCount;
    if (car.platformCount == 1 || car.platformCount == 3 || car.platformCount == 5)
      byCount[car.platformCount] += double(n) * car.platformCount;
  }
  const double plat = double(m.platformCount);
  m.pct53Platforms = pct(p53, plat);
  m.pct1PlatformShare = pct(byCount[1], plat);
  m.pct3PlatformShare = pct(byCount[3], plat);
  m.pct5PlatformShare = pct(byCount[5], plat);
  m.demandAsymmetry = railplan::demandAsymmetry(inst);
  return m;
}

std::vector<ComparisonRow> compareModels(const std::vector<ModelRun>& runs) {
  std::vector<ComparisonRow> rows;
  if (runs.empty()) return rows;
  const ModelRun* ref = &runs.front();
  for (const ModelRun& r : runs) {
    if (r.solution.instanceFingerprint != runs.front().solution.instanceFingerprint)
      throw std::invalid_argument("compared solutions belong to different instances");
    if (r.solution.formulation == Formulation::SsndRm && ref->solution.formulation != Formulation::SsndRm) ref = &r;
  }
  const double base = ref->metrics.capacityUsage;
  for (const ModelRun& r : runs)
    rows.push_back({r.solution.formulation, r.solution.objective, r.solution.totalTime,
                    r.metrics.unsatisfiedDemandPct, r.metrics.capacityUsage,
                    base > 0 ? 100.0 * (base - r.metrics.capacityUsage) / base : 0.0});
  return rows;
}

namespace {

std::string num(double x) {
  if (!std::isfinite(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}
std::string num(const std::optional<double>& x) { return x ? num(*x) : ""; }

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

template <class... A>
std::string line(const A&... a) {
  std::string s;
  ((s += (s.empty() ? "" : ",") + csvField(a)), ...);
  return s + "\n";
}

void writeFile(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << body;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

std::string b(bool v) { return v ? "1" : "0"; }

}  // namespace

void exportReports(const std::vector<BatchRecord>& batch, const std::filesystem::path& outDir,
                   const std::string& configJson) {
  std::error_code ec;
  std::filesystem::create_directories(outDir, ec);
  if (ec) throw std::runtime_error("cannot create " + outDir.string() + ": " + ec.message());

  std::string runs = line(std::string("instance"), std::string("seed"), std::string("scenario"),
                          std::string("formulation"), std::string("extras"), std::string("warm_start"),
                          std::string("status"), std::string("objective"), std::string("gap_pct"),
                          std::string("root_gap_pct"), std::string("warm_start_time_s"), std::string("total_time_s"),
                          std::string("unsatisfied_pct"), std::string("capacity_usage_pct"),
                          std::string("slot_used_pct"), std::string("slot_used_loaded_pct"),
                          std::string("extra_trains"), std::string("railcars"), std::string("platforms"),
                          std::string("pct_53_platforms"), std::string("pct_1_platform"),
                          std::string("pct_3_platform"), std::string("pct_5_platform"));
  for (const BatchRecord& r : batch) {
    const auto& s = r.run.solution;
    const auto& m = r.run.metrics;
    runs += line(r.instance, std::to_string(r.seed), r.scenario, std::string(toString(s.formulation)), b(r.extras),
                 b(r.warmStart), r.status, num(s.objective), num(100 * s.gap), num(100 * s.rootGap),
                 num(s.warmStartTime), num(s.totalTime), num(m.unsatisfiedDemandPct), num(m.capacityUsage),
                 num(m.slotUtilizationPct), num(m.slotUtilizationLoadedPct), std::to_string(m.extraTrainCount),
                 std::to_string(m.railcarCount), std::to_string(m.platformCount), num(m.pct53Platforms),
                 num(m.pct1PlatformShare), num(m.pct3PlatformShare), num(m.pct5PlatformShare));
  }
  writeFile(outDir / "runs.csv", runs);

  // group by (instance, scenario, extras) in first-seen order
  std::vector<std::tuple<std::string, std::string, bool>> keys;
  std::map<std::tuple<std::string, std::string, bool>, std::vector<ModelRun>> groups;
  for (const BatchRecord& r : batch) {
    auto k = std::make_tuple(r.instance, r.scenario, r.extras);
    if (!groups.count(k)) keys.push_back(k);
    groups[k].push_back(r.run);
  }
  std::string cmp = line(std::string("instance"), std::string("scenario"), std::string("extras"),
                         std::string("formulation"), std::string("objective"), std::string("time_s"),
                         std::string("unsatisfied_pct"), std::string("capacity_usage_pct"),
                         std::string("usage_diff_pct"));
  for (const auto& k : keys)
    for (const ComparisonRow& c : compareModels(groups[k]))
      cmp += line(std::get<0>(k), std::get<1>(k), b(std::get<2>(k)), std::string(toString(c.formulation)),
                  num(c.objective), num(c.time), num(c.unsatisfiedDemandPct), num(c.capacityUsage),
                  num(c.usageDiffPct));
  writeFile(outDir / "model_comparison.csv", cmp);

  std::string fleet = line(std::string("instance"), std::string("scenario"), std::string("extras"),
                           std::string("railcars"), std::string("platforms"), std::string("pct_53_platforms"),
                           std::string("pct_1_platform"), std::string("pct_3_platform"),
                           std::string("pct_5_platform"), std::string("slot_used_pct"),
                           std::string("slot_used_loaded_pct"));
  ordered_json blocks = ordered_json::array();
  for (const BatchRecord& r : batch) {
    if (r.run.solution.formulation != Formulation::SsndRm) continue;
    const auto& m = r.run.metrics;
    fleet += line(r.instance, r.scenario, b(r.extras), std::to_string(m.railcarCount), std::to_string(m.platformCount),
                  num(m.pct53Platforms), num(m.pct1PlatformShare), num(m.pct3PlatformShare),
                  num(m.pct5PlatformShare), num(m.slotUtilizationPct), num(m.slotUtilizationLoadedPct));
    ordered_json rows = ordered_json::array();
    for (const auto& s : m.perBlockScatter)
      rows.push_back({{"block", s.block},
                      {"ratio40Platforms", s.ratio40Platforms},
                      {"ratio40Containers", s.ratio40Containers},
                      {"slotUtilization", s.slotUtilization}});
    blocks.push_back({{"instance", r.instance}, {"scenario", r.scenario}, {"extras", r.extras}, {"blocks", rows}});
  }
  writeFile(outDir / "fleet_composition.csv", fleet);
  writeFile(outDir / "block_composition.json", blocks.dump(2) + "\n");

  ordered_json profile = ordered_json::array();
  ordered_json instances = ordered_json::array();
  std::set<std::string> seen;
  for (const BatchRecord& r : batch) {
    if (!seen.insert(r.instance).second) continue;
    ordered_json asym = ordered_json::array();
    for (const auto& a : r.run.metrics.demandAsymmetry)
      asym.push_back({{"a", a.a}, {"b", a.b}, {"forward", a.forward}, {"backward", a.backward}, {"percent", a.percent}});
    profile.push_back({{"instance", r.instance},
                       {"seed", r.seed},
                       {"containers40Pct", r.containers40Pct},
                       {"asymmetry", asym}});
    instances.push_back({{"instance", r.instance}, {"seed", r.seed}, {"sha256", r.instanceSha256}});
  }
  writeFile(outDir / "demand_profile.json", profile.dump(2) + "\n");

  ordered_json manifest;
  manifest["tool"] = "railplan";
  manifest["version"] = kToolVersion;
  manifest["config"] = ordered_json::parse(configJson.empty() ? "{}" : configJson);
  manifest["instances"] = instances;
  manifest["files"] = {"runs.csv",           "model_comparison.csv", "fleet_composition.csv",
                       "demand_profile.json", "block_composition.json"};
  writeFile(outDir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace railplan
