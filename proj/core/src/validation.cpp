#include "railplan/validation.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace railplan {

bool ValidationReport::valid() const {
  return std::none_of(items.begin(), items.end(), [](const Violation& v) { return v.severity == Severity::Error; });
}

std::vector<Violation> ValidationReport::errors() const {
  std::vector<Violation> out;
  for (const auto& v : items)
    if (v.severity == Severity::Error) out.push_back(v);
  return out;
}

std::vector<Violation> ValidationReport::warnings() const {
  std::vector<Violation> out;
  for (const auto& v : items)
    if (v.severity == Severity::Warning) out.push_back(v);
  return out;
}

namespace {

class Checker {
 public:
  explicit Checker(ValidationReport& r) : r_(r) {}
  void error(std::string rule, std::string subject, std::string msg) {
    r_.items.push_back({Severity::Error, std::move(rule), std::move(subject), std::move(msg)});
  }
  void warn(std::string rule, std::string subject, std::string msg) {
    r_.items.push_back({Severity::Warning, std::move(rule), std::move(subject), std::move(msg)});
  }

 private:
  ValidationReport& r_;
};

template <class Range, class Id>
void uniqueIds(Checker& c, const Range& items, Id id, const std::string& what) {
  std::set<std::string> seen;
  for (const auto& it : items)
    if (!seen.insert(id(it)).second) c.error(what + ".unique-id", id(it), what + " id is duplicated");
}

bool inCycle(Minutes t, Minutes T) { return t >= 0 && t < T; }

void checkService(Checker& c, const Instance& inst, const TrainService& s) {
  const Minutes T = inst.T();
  const std::string& id = s.id;
  const int nt = static_cast<int>(inst.terminals.size());
  if (s.stops.size() < 2) {
    c.error("service.min-stops", id, "service needs at least two stops");
    return;
  }
  for (std::size_t i = 0; i < s.stops.size(); ++i) {
    const Stop& st = s.stops[i];
    std::string where = id + "#" + std::to_string(i);
    if (st.terminal < 0 || st.terminal >= nt) c.error("service.stop-terminal", where, "stop terminal does not resolve");
    bool first = i == 0, last = i + 1 == s.stops.size();
    if (first && st.arrival) c.error("service.origin-arrival", where, "origin stop must not have an arrival time");
    if (last && st.departure)
      c.error("service.destination-departure", where, "destination stop must not have a departure time");
    if (!first && !st.arrival) c.error("service.stop-arrival", where, "stop is missing its arrival time");
    if (!last && !st.departure) c.error("service.stop-departure", where, "stop is missing its departure time");
    if (st.arrival && !inCycle(*st.arrival, T)) c.error("service.time-range", where, "arrival time outside [0, T)");
    if (st.departure && !inCycle(*st.departure, T))
      c.error("service.time-range", where, "departure time outside [0, T)");
  }
  if (s.legs.size() + 1 != s.stops.size()) {
    c.error("service.leg-count", id, "leg count must be one less than the stop count");
    return;
  }
  for (std::size_t j = 0; j < s.legs.size(); ++j) {
    std::string where = id + ":leg" + std::to_string(j);
    if (s.legs[j].capacity <= 0) c.error("leg.capacity-positive", where, "leg capacity must be positive");
    if (s.legs[j].distance <= 0) c.error("leg.distance-positive", where, "leg distance must be positive");
  }
  bool timed = true;
  for (std::size_t i = 0; i < s.stops.size(); ++i) {
    const Stop& st = s.stops[i];
    if ((i > 0 && !st.arrival) || (i + 1 < s.stops.size() && !st.departure)) timed = false;
    if ((st.arrival && !inCycle(*st.arrival, T)) || (st.departure && !inCycle(*st.departure, T))) timed = false;
  }
  if (timed && T > 0) {
    Minutes total = 0;
    for (std::size_t j = 0; j < s.legs.size(); ++j) {
      Minutes travel = cyclicDuration(*s.stops[j].departure, *s.stops[j + 1].arrival, T);
      if (travel == 0) c.error("leg.travel-positive", id + ":leg" + std::to_string(j), "leg travel time must be positive");
      total += travel;
      if (j + 1 < s.legs.size()) total += cyclicDuration(*s.stops[j + 1].arrival, *s.stops[j + 1].departure, T);
    }
    if (total >= T) c.error("service.duration", id, "service duration must be shorter than the schedule length");
  }
  if (s.minLoadFraction < 0.0 || s.minLoadFraction > 1.0)
    c.error("service.min-load-fraction", id, "minimum load fraction must lie in [0, 1]");
  if (s.minLoadLegs) {
    for (int l : *s.minLoadLegs)
      if (l < 0 || l >= static_cast<int>(s.legs.size()))
        c.error("service.min-load-legs", id, "minimum-load leg index " + std::to_string(l) + " out of range");
  }
  if (s.fixedCost && *s.fixedCost < Money{}) c.error("service.fixed-cost", id, "fixed cost must be non-negative");
}

}  // namespace

ValidationReport validateInstance(const Instance& inst) {
  ValidationReport report;
  Checker c(report);
  const PlanningConfig& g = inst.config;

  if (g.scheduleLength <= 0) c.error("config.schedule-length", "config", "schedule length T must be positive");
  if (g.transferTime < 0 || g.transferTime >= g.scheduleLength)
    c.error("config.transfer-time", "config", "transfer time must lie in [0, T)");
  if (!(g.warmStartEpsilon > 0)) c.error("config.epsilon", "config", "warm-start epsilon must be positive");
  if (!(g.mipGapTarget >= 0)) c.error("config.gap", "config", "gap target must be non-negative");
  if (!(g.timeLimit > 0)) c.error("config.time-limit", "config", "time limit must be positive");
  if (g.solverThreads < 1) c.error("config.threads", "config", "solver threads must be at least 1");

  uniqueIds(c, inst.terminals, [](const Terminal& t) { return t.id; }, "terminal");
  for (const auto& t : inst.terminals)
    if (t.region.empty()) c.error("terminal.region", t.id, "terminal region must be non-empty");

  if (inst.services.empty()) c.error("schedule.non-empty", "services", "schedule must contain at least one service");
  uniqueIds(c, inst.services, [](const TrainService& s) { return s.id; }, "service");
  if (g.scheduleLength > 0)
    for (const auto& s : inst.services) checkService(c, inst, s);

  uniqueIds(c, inst.demands, [](const Demand& d) { return d.id; }, "demand");
  const int nt = static_cast<int>(inst.terminals.size());
  for (const auto& d : inst.demands) {
    if (d.origin < 0 || d.origin >= nt || d.destination < 0 || d.destination >= nt)
      c.error("demand.terminal", d.id, "demand terminal does not resolve");
    else if (d.origin == d.destination)
      c.error("demand.distinct-ends", d.id, "demand origin and destination must differ");
    if (d.volume < 1) c.error("demand.volume", d.id, "demand volume must be at least 1");
    if (!inCycle(d.release, g.scheduleLength)) c.error("demand.time-range", d.id, "release time outside [0, T)");
    if (!inCycle(d.due, g.scheduleLength)) c.error("demand.time-range", d.id, "due time outside [0, T)");
    if (d.outsourcingCost < Money{}) c.error("demand.outsourcing-cost", d.id, "outsourcing cost must be non-negative");
  }

  uniqueIds(c, inst.railcars, [](const RailcarType& r) { return r.id; }, "railcar");
  for (const auto& r : inst.railcars) {
    if (r.platformCount < 1) c.error("railcar.platforms", r.id, "platform count must be at least 1");
    if (r.length <= 0) c.error("railcar.length", r.id, "car length must be positive");
    if (r.fleetLimit && *r.fleetLimit < 0) c.error("railcar.fleet-limit", r.id, "fleet limit must be non-negative");
  }
  // Per-platform length should fall as cars get more platforms.
  for (PlatformType p : kPlatformTypes) {
    std::vector<const RailcarType*> cars;
    for (const auto& r : inst.railcars)
      if (r.platform == p && r.platformCount >= 1 && r.length > 0) cars.push_back(&r);
    std::sort(cars.begin(), cars.end(),
              [](auto* a, auto* b) { return a->platformCount < b->platformCount; });
    for (std::size_t i = 1; i < cars.size(); ++i) {
      const RailcarType& a = *cars[i - 1];
      const RailcarType& b = *cars[i];
      if (a.platformCount == b.platformCount) continue;
      // b.length / b.eta < a.length / a.eta, cross-multiplied
      if (static_cast<long long>(b.length) * a.platformCount >= static_cast<long long>(a.length) * b.platformCount)
        c.warn("railcar.length-per-platform", b.id,
               "length per platform does not decrease with platform count (" + a.id + " vs " + b.id + ")");
    }
  }

  const CostParams& k = inst.costs;
  for (auto [name, m] : {std::pair{"build", k.build}, {"trans", k.trans}, {"wait", k.wait}, {"bord", k.bord},
                         {"km", k.km}, {"late", k.late}, {"alloc", k.alloc}, {"ndel", k.ndel}, {"fix", k.fix},
                         {"var", k.var}})
    if (m < Money{}) c.error("costs.non-negative", name, "cost parameter must be non-negative");

  return report;
}

}  // namespace railplan
