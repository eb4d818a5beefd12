#include "railplan/instance_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "railplan/validation.hpp"

namespace railplan {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::string fieldPath(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError("field " + path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError("field " + fieldPath(path, key) + ": missing");
  return *it;
}

template <class T>
T as(const json& v, const std::string& path) {
  try {
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ParseError("field " + path + ": expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ParseError("field " + path + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ParseError("field " + path + ": expected a string");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ParseError("field " + path + ": " + e.what());
  }
}

template <class T>
T get(const json& obj, const std::string& key, const std::string& path) {
  return as<T>(require(obj, key, path), fieldPath(path, key));
}

template <class T>
std::optional<T> opt(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return as<T>(*it, fieldPath(path, key));
}

const json& array(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw ParseError("field " + fieldPath(path, key) + ": expected an array");
  return v;
}

std::string idx(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

int resolveTerminal(const Instance& inst, const std::string& id, const std::string& where) {
  int t = inst.terminalIndex(id);
  if (t < 0) throw ReferenceError("unknown terminal '" + id + "' referenced by " + where);
  return t;
}

Money money(const json& obj, const std::string& key, const std::string& path, Money fallback) {
  auto v = opt<double>(obj, key, path);
  return v ? Money::fromDouble(*v) : fallback;
}

std::size_t lineOf(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace

Instance parseInstance(std::string_view text, const LoadOptions& opts) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("parse error at line " + std::to_string(lineOf(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("parse error at line 1: top level must be an object");

  Instance inst;
  inst.schemaVersion = opt<int>(doc, "schemaVersion", "").value_or(kSchemaVersion);
  if (inst.schemaVersion != kSchemaVersion)
    throw ParseError("field schemaVersion: unsupported version " + std::to_string(inst.schemaVersion));

  const json& terms = array(doc, "terminals", "");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    std::string p = idx("terminals", i);
    Terminal t;
    t.id = get<std::string>(terms[i], "id", p);
    t.name = opt<std::string>(terms[i], "name", p).value_or(t.id);
    t.region = opt<std::string>(terms[i], "region", p).value_or("");
    inst.terminals.push_back(std::move(t));
  }

  const json& cars = array(doc, "railcars", "");
  for (std::size_t i = 0; i < cars.size(); ++i) {
    std::string p = idx("railcars", i);
    RailcarType r;
    r.id = get<std::string>(cars[i], "id", p);
    try {
      r.platform = parsePlatformType(get<std::string>(cars[i], "platform", p));
    } catch (const ReferenceError& e) {
      throw ParseError("field " + p + ".platform: " + e.what());
    }
    r.platformCount = get<int>(cars[i], "platforms", p);
    r.length = get<int>(cars[i], "length", p);
    r.fleetLimit = opt<int>(cars[i], "fleetLimit", p);
    inst.railcars.push_back(std::move(r));
  }

  if (doc.contains("costs")) {
    const json& c = doc["costs"];
    CostParams d;
    inst.costs.build = money(c, "build", "costs", d.build);
    inst.costs.trans = money(c, "trans", "costs", d.trans);
    inst.costs.wait = money(c, "wait", "costs", d.wait);
    inst.costs.bord = money(c, "bord", "costs", d.bord);
    inst.costs.km = money(c, "km", "costs", d.km);
    inst.costs.late = money(c, "late", "costs", d.late);
    inst.costs.alloc = money(c, "alloc", "costs", d.alloc);
    inst.costs.ndel = money(c, "ndel", "costs", d.ndel);
    inst.costs.fix = money(c, "fix", "costs", d.fix);
    inst.costs.var = money(c, "var", "costs", d.var);
  }

  const json& cfg = require(doc, "config", "");
  PlanningConfig dc;
  inst.config.scheduleLength = opt<Minutes>(cfg, "scheduleLength", "config").value_or(dc.scheduleLength);
  inst.config.transferTime = get<Minutes>(cfg, "transferTime", "config");
  inst.config.warmStartEpsilon = opt<double>(cfg, "warmStartEpsilon", "config").value_or(dc.warmStartEpsilon);
  inst.config.mipGapTarget = opt<double>(cfg, "mipGapTarget", "config").value_or(dc.mipGapTarget);
  inst.config.timeLimit = opt<double>(cfg, "timeLimit", "config").value_or(dc.timeLimit);
  inst.config.solverThreads = opt<int>(cfg, "threads", "config").value_or(dc.solverThreads);

  const json& svcs = array(doc, "services", "");
  for (std::size_t i = 0; i < svcs.size(); ++i) {
    std::string p = idx("services", i);
    const json& s = svcs[i];
    TrainService svc;
    svc.id = get<std::string>(s, "id", p);
    std::string kind = opt<std::string>(s, "kind", p).value_or("regular");
    if (kind == "regular") svc.kind = ServiceKind::Regular;
    else if (kind == "extra") svc.kind = ServiceKind::ExtraCandidate;
    else throw ParseError("field " + p + ".kind: expected 'regular' or 'extra', got '" + kind + "'");
    const json& stops = array(s, "stops", p);
    for (std::size_t j = 0; j < stops.size(); ++j) {
      std::string sp = idx(p + ".stops", j);
      Stop st;
      st.terminal = resolveTerminal(inst, get<std::string>(stops[j], "terminal", sp), "service '" + svc.id + "'");
      st.arrival = opt<Minutes>(stops[j], "arrival", sp);
      st.departure = opt<Minutes>(stops[j], "departure", sp);
      svc.stops.push_back(st);
    }
    const json& legs = array(s, "legs", p);
    for (std::size_t j = 0; j < legs.size(); ++j) {
      std::string lp = idx(p + ".legs", j);
      svc.legs.push_back({get<int>(legs[j], "capacity", lp), get<int>(legs[j], "distance", lp)});
    }
    if (auto fc = opt<double>(s, "fixedCost", p)) svc.fixedCost = Money::fromDouble(*fc);
    svc.minLoadFraction = opt<double>(s, "minLoadFraction", p).value_or(0.5);
    if (s.contains("minLoadLegs") && !s["minLoadLegs"].is_null())
      svc.minLoadLegs = as<std::vector<int>>(s["minLoadLegs"], p + ".minLoadLegs");
    inst.services.push_back(std::move(svc));
  }

  const json& dems = array(doc, "demands", "");
  for (std::size_t i = 0; i < dems.size(); ++i) {
    std::string p = idx("demands", i);
    const json& d = dems[i];
    Demand k;
    k.id = get<std::string>(d, "id", p);
    std::string where = "demand '" + k.id + "'";
    k.origin = resolveTerminal(inst, get<std::string>(d, "origin", p), where);
    k.destination = resolveTerminal(inst, get<std::string>(d, "destination", p), where);
    k.release = get<Minutes>(d, "release", p);
    k.due = get<Minutes>(d, "due", p);
    k.volume = get<int>(d, "volume", p);
    try {
      k.type = parseContainerType(get<std::string>(d, "type", p));
    } catch (const ReferenceError& e) {
      throw ReferenceError(std::string(e.what()) + " in " + where);
    }
    k.outsourcingCost = money(d, "outsourcingCost", p, inst.costs.ndel);
    inst.demands.push_back(std::move(k));
  }

  if (opts.validate) {
    for (const Violation& v : validateInstance(inst).items)
      if (v.severity == Severity::Error)
        throw ValidationError(v.rule, "invariant violated [" + v.rule + "] on " + v.subject + ": " + v.message);
  }
  return inst;
}

Instance loadInstance(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parseInstance(ss.str(), opts);
}

std::string saveInstance(const Instance& inst) {
  ojson doc;
  doc["schemaVersion"] = inst.schemaVersion;
  doc["terminals"] = ojson::array();
  for (const auto& t : inst.terminals) doc["terminals"].push_back({{"id", t.id}, {"name", t.name}, {"region", t.region}});

  doc["services"] = ojson::array();
  for (const auto& s : inst.services) {
    ojson o;
    o["id"] = s.id;
    o["kind"] = s.isExtra() ? "extra" : "regular";
    o["stops"] = ojson::array();
    for (const auto& st : s.stops) {
      ojson so;
      so["terminal"] = inst.terminals.at(st.terminal).id;
      if (st.arrival) so["arrival"] = *st.arrival;
      if (st.departure) so["departure"] = *st.departure;
      o["stops"].push_back(so);
    }
    o["legs"] = ojson::array();
    for (const auto& l : s.legs) o["legs"].push_back({{"capacity", l.capacity}, {"distance", l.distance}});
    if (s.fixedCost) o["fixedCost"] = s.fixedCost->toDouble();
    o["minLoadFraction"] = s.minLoadFraction;
    if (s.minLoadLegs) o["minLoadLegs"] = *s.minLoadLegs;
    doc["services"].push_back(o);
  }

  doc["demands"] = ojson::array();
  for (const auto& d : inst.demands) {
    doc["demands"].push_back({{"id", d.id},
                              {"origin", inst.terminals.at(d.origin).id},
                              {"destination", inst.terminals.at(d.destination).id},
                              {"release", d.release},
                              {"due", d.due},
                              {"volume", d.volume},
                              {"type", toString(d.type)},
                              {"outsourcingCost", d.outsourcingCost.toDouble()}});
  }

  doc["railcars"] = ojson::array();
  for (const auto& r : inst.railcars) {
    ojson o{{"id", r.id}, {"platform", toString(r.platform)}, {"platforms", r.platformCount}, {"length", r.length}};
    if (r.fleetLimit) o["fleetLimit"] = *r.fleetLimit;
    doc["railcars"].push_back(o);
  }

  const CostParams& c = inst.costs;
  doc["costs"] = {{"build", c.build.toDouble()}, {"trans", c.trans.toDouble()}, {"wait", c.wait.toDouble()},
                  {"bord", c.bord.toDouble()},   {"km", c.km.toDouble()},       {"late", c.late.toDouble()},
                  {"alloc", c.alloc.toDouble()}, {"ndel", c.ndel.toDouble()},   {"fix", c.fix.toDouble()},
                  {"var", c.var.toDouble()}};
  const PlanningConfig& g = inst.config;
  doc["config"] = {{"scheduleLength", g.scheduleLength}, {"transferTime", g.transferTime},
                   {"warmStartEpsilon", g.warmStartEpsilon}, {"mipGapTarget", g.mipGapTarget},
                   {"timeLimit", g.timeLimit}, {"threads", g.solverThreads}};
  return doc.dump(2) + "\n";
}

void writeInstance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << saveInstance(inst);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace railplan
