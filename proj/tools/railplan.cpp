#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "railplan/fingerprint.hpp"
#include "railplan/generator.hpp"
#include "railplan/instance_io.hpp"
#include "railplan/pipeline.hpp"
#include "railplan/validation.hpp"

namespace fs = std::filesystem;
using namespace railplan;
using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kSolveFailed = 2, kAuditFailed = 3 };

struct Failure {
  int code;
  std::string kind;
  std::string message;
};

void report(const Failure& f) {
  ordered_json o{{"error", f.kind}, {"message", f.message}, {"exitCode", f.code}};
  std::cerr << o.dump() << "\n";
}

void warn(const std::string& msg) { std::cerr << ordered_json{{"warning", msg}}.dump() << "\n"; }

std::string readText(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Failure{kUsage, "io", "cannot read " + p.string()};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeText(const fs::path& p, const std::string& body) {
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << body)) throw Failure{kUsage, "io", "cannot write " + p.string()};
}

// "1-7" or "1,3,5" or "2".
std::vector<int> parseIdList(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto dash = part.find('-');
    try {
      if (dash == std::string::npos) out.push_back(std::stoi(part));
      else
        for (int i = std::stoi(part.substr(0, dash)); i <= std::stoi(part.substr(dash + 1)); ++i) out.push_back(i);
    } catch (const std::exception&) {
      throw Failure{kUsage, "usage", "bad id list '" + s + "'"};
    }
  }
  return out;
}

std::vector<Formulation> parseFormulations(const std::vector<std::string>& names) {
  std::vector<Formulation> out;
  for (const auto& n : names) {
    try {
      out.push_back(parseFormulation(n));
    } catch (const std::invalid_argument& e) {
      throw Failure{kUsage, "usage", e.what()};
    }
  }
  return out;
}

std::vector<KindGroup> parseGroupOrder(const std::string& s) {
  static const std::map<std::string, milp::VarKind> kinds{
      {"y", milp::VarKind::BlockSelect}, {"x", milp::VarKind::LoadedCars},  {"w", milp::VarKind::EmptyCars},
      {"wa", milp::VarKind::Allocation}, {"wp", milp::VarKind::PoolInventory}};
  std::vector<KindGroup> order;
  std::stringstream groups(s);
  std::string g;
  while (std::getline(groups, g, ';')) {
    KindGroup kg;
    std::stringstream items(g);
    std::string it;
    while (std::getline(items, it, ',')) {
      auto k = kinds.find(it);
      if (k == kinds.end()) throw Failure{kUsage, "usage", "unknown variable group '" + it + "'"};
      kg.push_back(k->second);
    }
    order.push_back(std::move(kg));
  }
  return order;
}

struct SolverFlags {
  std::optional<double> gap, timeLimit, epsilon;
  std::optional<int> threads;
  int seed = 0;
  bool warmStart = true;
  bool extras = true;
  std::string solver;
  std::string groupOrder;
  int maxTransfers = 3;
  bool verbose = false;

  void add(CLI::App* app, bool defaultExtras = true) {
    extras = defaultExtras;
    app->add_option("--gap", gap, "relative MIP gap target (default from instance, 0.025)");
    app->add_option("--time-limit", timeLimit, "seconds");
    app->add_option("--threads", threads, "solver threads");
    app->add_option("--epsilon", epsilon, "warm-start fixing threshold");
    app->add_option("--random-seed", seed, "solver random seed");
    app->add_flag("--warm-start,!--no-warm-start", warmStart, "relax-and-fix warm start before the exact solve");
    app->add_flag("--extras,!--no-extras", extras, "keep extra train candidates");
    app->add_option("--solver", solver, "backend name (default $RAILPLAN_SOLVER or highs)");
    app->add_option("--group-order", groupOrder, "warm-start groups, e.g. 'y,x;w,wa,wp'");
    app->add_option("--max-transfers", maxTransfers, "block transfer limit")->check(CLI::NonNegativeNumber);
    app->add_flag("--verbose", verbose, "solver log to stdout");
  }

  RunOptions options(const Instance& inst) const {
    RunOptions o = runOptionsFor(inst);
    o.warmStart = warmStart;
    if (gap) o.warm.gapTarget = *gap;
    if (timeLimit) o.warm.timeLimit = *timeLimit;
    if (epsilon) o.warm.epsilon = *epsilon;
    if (threads) o.warm.threads = *threads;
    o.warm.randomSeed = seed;
    o.warm.verbose = verbose;
    if (!groupOrder.empty()) o.warm.groupOrder = parseGroupOrder(groupOrder);
    return o;
  }

  std::unique_ptr<milp::SolverBackend> backend() const {
    try {
      return milp::makeBackend(solver);
    } catch (const std::exception& e) {
      throw Failure{kUsage, "usage", e.what()};
    }
  }

  ordered_json json() const {
    ordered_json o;
    o["gap"] = gap ? ordered_json(*gap) : ordered_json(nullptr);
    o["timeLimit"] = timeLimit ? ordered_json(*timeLimit) : ordered_json(nullptr);
    o["threads"] = threads ? ordered_json(*threads) : ordered_json(nullptr);
    o["epsilon"] = epsilon ? ordered_json(*epsilon) : ordered_json(nullptr);
    o["randomSeed"] = seed;
    o["warmStart"] = warmStart;
    o["extras"] = extras;
    o["solver"] = solver;
    o["groupOrder"] = groupOrder;
    o["maxTransfers"] = maxTransfers;
    return o;
  }
};

Instance loadOrFail(const std::string& path) {
  try {
    return loadInstance(path);
  } catch (const ParseError& e) {
    throw Failure{kUsage, "parse", e.what()};
  } catch (const ReferenceError& e) {
    throw Failure{kUsage, "reference", e.what()};
  } catch (const ValidationError& e) {
    throw Failure{kUsage, "validation", e.what()};
  }
}

Prepared prepareFor(Instance inst, const SolverFlags& f) {
  if (!f.extras) inst = withoutExtras(inst);
  BlockLimits lim;
  lim.maxTransfers = f.maxTransfers;
  return prepare(std::move(inst), lim);
}

ordered_json manifestFor(const Prepared& p, const ordered_json& config, const std::string& command) {
  ordered_json m;
  m["tool"] = "railplan";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["config"] = config;
  m["instanceSha256"] = instanceFingerprint(p.inst);
  m["catalogSha256"] = catalogFingerprint(p.inst, p.cat);
  return m;
}

int exitFor(const RunOutcome& r) {
  if (!r.solved()) return kSolveFailed;
  if (!r.audit.ok()) return kAuditFailed;
  return kOk;
}

void writeRun(const fs::path& dir, const RunOutcome& r, bool lp, bool explain) {
  const std::string tag = toString(r.built.formulation);
  writeText(dir / ("solution-" + tag + ".json"), solutionJson(r));
  writeText(dir / ("solve_log-" + tag + ".json"), milp::solveLogJson(r.result));
  if (r.warm) writeText(dir / ("stage_log-" + tag + ".json"), stageLogJson(*r.warm));
  if (r.solved()) {
    writeText(dir / ("audit-" + tag + ".json"), r.audit.toJson());
    writeText(dir / ("metrics-" + tag + ".json"), r.metrics.toJson());
  }
  if (lp) writeText(dir / ("model-" + tag + ".lp"), milp::toLpFormat(r.built.model));
  if (explain) writeText(dir / ("rows-" + tag + ".json"), r.built.explainJson());
}

ordered_json summary(const RunOutcome& r) {
  ordered_json o;
  o["formulation"] = toString(r.built.formulation);
  o["status"] = milp::toString(r.result.status);
  o["objective"] = std::isfinite(r.result.objective) ? ordered_json(r.result.objective) : ordered_json(nullptr);
  o["gap"] = std::isfinite(r.result.gap) ? ordered_json(r.result.gap) : ordered_json(nullptr);
  o["time"] = r.result.wallTime;
  if (r.warm) {
    o["warmStart"] = r.warm->success;
    o["warmStartObjective"] = r.warm->success ? ordered_json(r.warm->objective) : ordered_json(nullptr);
  }
  if (r.solved()) o["auditViolations"] = r.audit.violations.size();
  return o;
}

// ---- generate ----

struct GenerateArgs {
  std::string out = "instances";
  std::string base;
  std::uint64_t seed = 1;
  int count = 1;
  int scenario = 7;
  bool extras = false;
  DeskParams desk;
};

ordered_json deskJson(const DeskParams& d) {
  return {{"terminals", d.size.terminals},        {"services", d.size.services},
          {"legsPerService", d.size.legsPerService}, {"capacityMin", d.size.capacityMin},
          {"capacityMax", d.size.capacityMax},    {"distanceMin", d.size.distanceMin},
          {"distanceMax", d.size.distanceMax},    {"regions", d.size.regions},
          {"transferTime", d.size.transferTime},  {"odPairs", d.odPairs},
          {"volumeMin", d.volumeMin},             {"volumeMax", d.volumeMax},
          {"share40Min", d.share40Min},           {"share40Max", d.share40Max},
          {"dueSlackFactor", d.dueSlackFactor}};
}

void addDeskFlags(CLI::App* app, DeskParams& d) {
  app->add_option("--terminals", d.size.terminals)->check(CLI::PositiveNumber);
  app->add_option("--services", d.size.services)->check(CLI::PositiveNumber);
  app->add_option("--legs", d.size.legsPerService)->check(CLI::PositiveNumber);
  app->add_option("--capacity-min", d.size.capacityMin);
  app->add_option("--capacity-max", d.size.capacityMax);
  app->add_option("--transfer-time", d.size.transferTime);
  app->add_option("--od-pairs", d.odPairs)->check(CLI::NonNegativeNumber);
  app->add_option("--volume-min", d.volumeMin)->check(CLI::PositiveNumber);
  app->add_option("--volume-max", d.volumeMax)->check(CLI::PositiveNumber);
  app->add_option("--share-min", d.share40Min)->check(CLI::Range(0.0, 1.0));
  app->add_option("--share-max", d.share40Max)->check(CLI::Range(0.0, 1.0));
  app->add_option("--due-slack", d.dueSlackFactor)->check(CLI::NonNegativeNumber);
}

Instance generateOne(const GenerateArgs& a, std::uint64_t seed, std::vector<std::string>& warnings) {
  Instance inst;
  try {
    if (!a.base.empty()) {
      inst = loadOrFail(a.base);
      std::map<std::pair<int, int>, int> totals;
      for (const Demand& d : inst.demands) totals[{d.origin, d.destination}] += d.volume;
      GeneratorSpec spec;
      spec.seed = seed;
      spec.share40Min = a.desk.share40Min;
      spec.share40Max = a.desk.share40Max;
      spec.dueSlackFactor = a.desk.dueSlackFactor;
      for (auto [od, v] : totals) spec.odTotals.push_back({od.first, od.second, v});
      GeneratedDemands g = generateDemands(inst, spec);
      inst.demands = std::move(g.demands);
      warnings = std::move(g.warnings);
    } else {
      inst = generateDeskInstance(a.desk, seed, &warnings);
    }
    inst = applyFleetScenario(inst, a.scenario);
    if (a.extras) inst = duplicateAsExtras(inst);
  } catch (const Failure&) {
    throw;
  } catch (const std::exception& e) {
    throw Failure{kUsage, "generate", e.what()};
  }
  return inst;
}

int runGenerate(const GenerateArgs& a) {
  std::vector<ManifestEntry> entries;
  for (int i = 0; i < a.count; ++i) {
    std::uint64_t seed = a.seed + i;
    std::vector<std::string> warnings;
    Instance inst = generateOne(a, seed, warnings);
    for (const auto& w : warnings) warn(w);
    std::string name = "instance-" + std::to_string(seed) + ".json";
    std::string body = saveInstance(inst);
    writeText(fs::path(a.out) / name, body);
    ordered_json spec = deskJson(a.desk);
    spec["scenario"] = a.scenario;
    spec["extras"] = a.extras;
    if (!a.base.empty()) spec["base"] = a.base;
    entries.push_back({name, seed, spec.dump(), sha256Hex(body)});
    std::cout << (fs::path(a.out) / name).string() << "\n";
  }
  writeText(fs::path(a.out) / "manifest.json", manifestJson(entries));
  return kOk;
}

// ---- blocks ----

int runBlocks(const std::string& instancePath, const std::string& out, const SolverFlags& f, bool dot) {
  Prepared p = prepareFor(loadOrFail(instancePath), f);
  fs::path dir(out);
  writeText(dir / "blocks.jsonl", p.cat.toJsonLines(p.inst));
  writeText(dir / "network.json", p.net.toJson());
  if (dot) writeText(dir / "network.dot", p.net.toDot(p.inst));
  for (const auto& w : p.cat.warnings) warn(w);
  std::size_t pairs = 0;
  for (const auto& b : p.cat.demandBlocks) pairs += b.size();
  ordered_json o{{"blocks", p.cat.blocks.size()}, {"nodes", p.net.nodes.size()}, {"arcs", p.net.arcs.size()},
                 {"demandBlockPairs", pairs}};
  std::cout << o.dump() << "\n";
  return kOk;
}

// ---- solve ----

int runSolve(const std::string& instancePath, const std::string& out, const std::string& formulation,
             const SolverFlags& f, bool lp, bool explain) {
  Formulation form;
  try {
    form = parseFormulation(formulation);
  } catch (const std::invalid_argument& e) {
    throw Failure{kUsage, "usage", e.what()};
  }
  Prepared p = prepareFor(loadOrFail(instancePath), f);
  RunOptions opt = f.options(p.inst);
  auto backend = f.backend();
  RunOutcome r = runFormulation(p, form, opt, *backend);
  fs::path dir(out);
  writeText(dir / "instance.json", saveInstance(p.inst));
  writeRun(dir, r, lp, explain);
  ordered_json cfg = f.json();
  cfg["formulation"] = toString(form);
  cfg["instance"] = instancePath;
  writeText(dir / "manifest.json", manifestFor(p, cfg, "solve").dump(2) + "\n");
  if (r.warm && !r.warm->success) warn("warm start failed at " + r.warm->failedStage + ": " + r.warm->message);
  std::cout << summary(r).dump() << "\n";
  int code = exitFor(r);
  if (code == kSolveFailed) report({code, "solve", r.result.message.empty() ? "no solution found" : r.result.message});
  if (code == kAuditFailed) report({code, "audit", std::to_string(r.audit.violations.size()) + " audit violations"});
  return code;
}

// ---- audit ----

int runAudit(const std::string& instancePath, const std::string& solutionPath, const std::string& out,
             const SolverFlags& f) {
  Prepared p = prepareFor(loadOrFail(instancePath), f);
  std::string text = readText(solutionPath);
  RunOutcome r{};
  try {
    SolutionHeader h = readSolutionHeader(text);
    r.built = buildFormulation(h.formulation, p.inst, p.cat, p.net);
    if (!h.instanceFingerprint.empty() && h.instanceFingerprint != r.built.instanceFingerprint)
      throw Failure{kUsage, "mismatch", "solution was computed for a different instance"};
    r.plan = readSolution(text, r.built);
  } catch (const Failure&) {
    throw;
  } catch (const std::exception& e) {
    throw Failure{kUsage, "parse", e.what()};
  }
  AuditReport rep = auditSolution(r.plan, r.built, p.inst, p.cat, p.net);
  if (!out.empty()) writeText(out, rep.toJson());
  else std::cout << rep.toJson();
  if (!rep.ok()) {
    report({kAuditFailed, "audit", std::to_string(rep.violations.size()) + " audit violations"});
    return kAuditFailed;
  }
  return kOk;
}

// ---- compare / sweep ----

BatchRecord record(const std::string& name, std::uint64_t seed, const std::string& scenario, const Prepared& p,
                   const RunOutcome& r, bool warmStart) {
  BatchRecord b;
  b.instance = name;
  b.instanceSha256 = instanceFingerprint(p.inst);
  b.seed = seed;
  b.scenario = scenario;
  b.extras = p.inst.hasExtras();
  b.warmStart = warmStart;
  b.status = !r.solved() ? milp::toString(r.result.status) : r.audit.ok() ? "ok" : "audit-failed";
  b.run = {r.plan, r.metrics};
  b.run.metrics.formulation = r.built.formulation;
  if (!r.solved()) b.run.metrics.demandAsymmetry = demandAsymmetry(p.inst);
  double v40 = 0, all = 0;
  for (const Demand& d : p.inst.demands) {
    all += d.volume;
    if (d.type == ContainerType::T40) v40 += d.volume;
  }
  b.containers40Pct = all > 0 ? 100.0 * v40 / all : 0.0;
  return b;
}

int worst(int a, int b) { return std::max(a, b); }

int runCompare(const std::string& instancePath, const std::string& out, const std::vector<std::string>& forms,
               const SolverFlags& f) {
  Prepared p = prepareFor(loadOrFail(instancePath), f);
  auto backend = f.backend();
  std::vector<BatchRecord> batch;
  int code = kOk;
  fs::path dir(out);
  ordered_json rows = ordered_json::array();
  for (Formulation form : parseFormulations(forms)) {
    RunOutcome r = runFormulation(p, form, f.options(p.inst), *backend);
    writeRun(dir, r, false, false);
    batch.push_back(record(fs::path(instancePath).filename().string(), 0, "", p, r, f.warmStart));
    rows.push_back(summary(r));
    code = worst(code, exitFor(r));
  }
  ordered_json cfg = f.json();
  cfg["instance"] = instancePath;
  exportReports(batch, dir, cfg.dump());
  std::cout << rows.dump() << "\n";
  if (code != kOk) report({code, code == kSolveFailed ? "solve" : "audit", "some formulations failed"});
  return code;
}

struct SweepArgs {
  std::string out = "sweep";
  std::string scenarios = "1-7";
  int seeds = 5;
  std::uint64_t seedStart = 1;
  std::vector<std::string> formulations{"ssndrm", "uf", "ul"};
  int workers = 1;
  DeskParams desk;
};

int runSweep(const SweepArgs& a, const SolverFlags& f) {
  std::vector<int> scenarios = parseIdList(a.scenarios);
  for (int s : scenarios)
    if (s < 1 || s > 7) throw Failure{kUsage, "usage", "scenario ids must be in 1..7"};
  std::vector<Formulation> forms = parseFormulations(a.formulations);
  fs::path dir(a.out);

  struct Job {
    std::uint64_t seed;
    int scenario;
  };
  std::vector<Job> jobs;
  for (int i = 0; i < a.seeds; ++i)
    for (int s : scenarios) jobs.push_back({a.seedStart + i, s});
  std::vector<std::vector<BatchRecord>> results(jobs.size());
  std::vector<int> codes(jobs.size(), kOk);
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex logMutex;

  auto worker = [&] {
    auto backend = f.backend();
    for (std::size_t j; (j = next++) < jobs.size();) {
      try {
        std::vector<std::string> warnings;
        Instance inst = generateDeskInstance(a.desk, jobs[j].seed, &warnings);
        inst = applyFleetScenario(inst, jobs[j].scenario);
        if (f.extras) inst = duplicateAsExtras(inst);
        Prepared p = prepareFor(inst, f);
        const std::string name = "seed" + std::to_string(jobs[j].seed) + "-s" + std::to_string(jobs[j].scenario);
        const std::string label = fleetScenario(jobs[j].scenario).label;
        writeText(dir / "instances" / (name + ".json"), saveInstance(p.inst));
        for (Formulation form : forms) {
          RunOutcome r = runFormulation(p, form, f.options(p.inst), *backend);
          codes[j] = worst(codes[j], exitFor(r));
          results[j].push_back(record(name, jobs[j].seed, label, p, r, f.warmStart));
          std::lock_guard<std::mutex> lock(logMutex);
          ordered_json s = summary(r);
          s["seed"] = jobs[j].seed;
          s["scenario"] = label;
          std::cout << s.dump() << "\n";
        }
      } catch (const std::exception& e) {
        codes[j] = kSolveFailed;
        errors[j] = e.what();
      }
    }
  };
  int n = std::max(1, std::min<int>(a.workers, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<BatchRecord> batch;
  int code = kOk;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    batch.insert(batch.end(), results[j].begin(), results[j].end());
    code = worst(code, codes[j]);
    if (!errors[j].empty()) report({kSolveFailed, "solve", errors[j]});
  }
  ordered_json cfg = f.json();
  cfg["scenarios"] = a.scenarios;
  cfg["seeds"] = a.seeds;
  cfg["seedStart"] = a.seedStart;
  cfg["formulations"] = a.formulations;
  cfg["desk"] = deskJson(a.desk);
  exportReports(batch, dir, cfg.dump());
  if (code != kOk) report({code, code == kSolveFailed ? "solve" : "audit", "some runs failed"});
  return code;
}

// Config file values become flags placed ahead of the command line, so explicit flags win.
std::vector<std::string> configArgs(const std::string& path, CLI::App* sub) {
  ordered_json cfg;
  try {
    cfg = ordered_json::parse(readText(path));
  } catch (const nlohmann::json::exception& e) {
    throw Failure{kUsage, "config", std::string("config is not valid JSON: ") + e.what()};
  }
  if (!cfg.is_object()) throw Failure{kUsage, "config", "config must be a JSON object"};
  std::vector<std::string> args;
  for (const auto& [key, v] : cfg.items()) {
    const std::string flag = "--" + key;
    if (v.is_boolean()) {
      const std::string name = v.get<bool>() ? flag : "--no-" + key;
      if (!sub->get_option_no_throw(name)) {
        if (sub->get_option_no_throw(flag)) throw Failure{kUsage, "config", "config key '" + key + "' is not a switch"};
        continue;
      }
      args.push_back(name);
      continue;
    }
    if (!sub->get_option_no_throw(flag)) continue;  // belongs to another command
    if (v.is_array()) {
      args.push_back(flag);
      for (const auto& e : v) args.push_back(e.is_string() ? e.get<std::string>() : e.dump());
    } else {
      args.push_back(flag);
      args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intermodal rail blocking and railcar fleet planning"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config;
  app.add_option("--config", config, "JSON file whose keys are long flag names");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "generate seeded desk-scale instances");
  g->add_option("--out", gen.out, "output directory");
  g->add_option("--base", gen.base, "redraw container mixes for this instance's OD totals");
  g->add_option("--seed", gen.seed, "first seed");
  g->add_option("--count", gen.count, "number of consecutive seeds")->check(CLI::PositiveNumber);
  g->add_option("--scenario", gen.scenario, "railcar fleet scenario 1..7")->check(CLI::Range(1, 7));
  g->add_flag("--extras,!--no-extras", gen.extras, "duplicate every service as an extra candidate");
  addDeskFlags(g, gen.desk);

  std::string instance, out, formulation = "ssndrm", solution;
  bool dot = false, lp = false, explain = false;
  SolverFlags blocksFlags, solveFlags, auditFlags, compareFlags, sweepFlags;

  auto* b = app.add_subcommand("blocks", "build the network and the block catalog");
  b->add_option("--instance", instance)->required();
  b->add_option("--out", out, "output directory")->default_val("blocks");
  b->add_flag("--dot", dot, "also write a DOT drawing of the network");
  b->add_flag("--extras,!--no-extras", blocksFlags.extras, "keep extra train candidates");
  b->add_option("--max-transfers", blocksFlags.maxTransfers);

  auto* s = app.add_subcommand("solve", "solve one formulation, audit it and write the run directory");
  s->add_option("--instance", instance)->required();
  s->add_option("--out", out, "run directory")->default_val("run");
  s->add_option("--formulation", formulation, "ssndrm, uf or ul");
  s->add_flag("--lp", lp, "write the model in LP format");
  s->add_flag("--explain", explain, "write the row-to-family map");
  solveFlags.add(s);

  auto* a = app.add_subcommand("audit", "re-verify a solution file");
  a->add_option("--instance", instance, "instance the solution was computed on")->required();
  a->add_option("--solution", solution)->required();
  a->add_option("--out", out, "report file (stdout when absent)");
  a->add_option("--max-transfers", auditFlags.maxTransfers);

  std::vector<std::string> forms{"ssndrm", "uf", "ul"};
  auto* c = app.add_subcommand("compare", "solve several formulations on one instance");
  c->add_option("--instance", instance)->required();
  c->add_option("--out", out, "output directory")->default_val("compare");
  c->add_option("--formulations", forms);
  compareFlags.add(c);

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "fleet scenario x seed x formulation matrix on generated instances");
  w->add_option("--out", sw.out);
  w->add_option("--scenarios", sw.scenarios, "e.g. 1-7 or 2,4,6");
  w->add_option("--seeds", sw.seeds, "number of seeds")->check(CLI::PositiveNumber);
  w->add_option("--seed-start", sw.seedStart);
  w->add_option("--formulations", sw.formulations);
  w->add_option("--workers", sw.workers)->check(CLI::PositiveNumber);
  addDeskFlags(w, sw.desk);
  sweepFlags.add(w, false);

  // resolve --config before the real parse
  std::vector<std::string> args(argv, argv + argc);
  try {
    std::string cfgPath;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) cfgPath = args[i + 1];
      else if (args[i].rfind("--config=", 0) == 0) cfgPath = args[i].substr(9);
    }
    if (!cfgPath.empty()) {
      for (std::size_t i = 1; i < args.size(); ++i) {
        CLI::App* sub = app.get_subcommand_no_throw(args[i]);
        if (!sub) continue;
        auto extra = configArgs(cfgPath, sub);
        args.insert(args.begin() + static_cast<long>(i) + 1, extra.begin(), extra.end());
        break;
      }
    }
  } catch (const Failure& f) {
    report(f);
    return f.code;
  }
  std::vector<char*> cargs;
  for (auto& s2 : args) cargs.push_back(s2.data());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help();
    report({kUsage, "usage", e.what()});
    return kUsage;
  }

  try {
    if (*g) return runGenerate(gen);
    if (*b) return runBlocks(instance, out, blocksFlags, dot);
    if (*s) return runSolve(instance, out, formulation, solveFlags, lp, explain);
    if (*a) return runAudit(instance, solution, out, auditFlags);
    if (*c) return runCompare(instance, out, forms, compareFlags);
    if (*w) return runSweep(sw, sweepFlags);
  } catch (const Failure& f) {
    report(f);
    return f.code;
  } catch (const std::exception& e) {
    report({kSolveFailed, "internal", e.what()});
    return kSolveFailed;
  }
  return kUsage;
}
