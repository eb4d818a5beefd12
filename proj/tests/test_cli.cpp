#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "railplan_cli_test";

int run(const std::string& args, std::string* err = nullptr) {
  std::string cmd = std::string(RAILPLAN_BIN) + " " + args + " >" + (kWork / "stdout.txt").string() + " 2>" +
                    (kWork / "stderr.txt").string();
  int st = std::system(cmd.c_str());
  if (err) {
    std::ifstream in(kWork / "stderr.txt");
    std::stringstream ss;
    ss << in.rdbuf();
    *err = ss.str();
  }
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string p(const fs::path& x) { return x.string(); }

nlohmann::json readJson(const fs::path& f) {
  std::ifstream in(f);
  return nlohmann::json::parse(in);
}

struct Workspace {
  Workspace() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

const std::string kSmall = "--terminals 3 --services 3 --od-pairs 3 --volume-min 2 --volume-max 4";

}  // namespace

TEST_CASE_FIXTURE(Workspace, "generate, solve and audit") {
  REQUIRE(run("generate --out " + p(kWork / "gen") + " --seed 5 " + kSmall) == 0);
  fs::path inst = kWork / "gen" / "instance-5.json";
  REQUIRE(fs::exists(inst));
  CHECK(fs::exists(kWork / "gen" / "manifest.json"));

  REQUIRE(run("blocks --instance " + p(inst) + " --out " + p(kWork / "blocks") + " --dot") == 0);
  CHECK(fs::exists(kWork / "blocks" / "blocks.jsonl"));
  CHECK(fs::exists(kWork / "blocks" / "network.dot"));

  fs::path out = kWork / "run";
  REQUIRE(run("solve --instance " + p(inst) + " --out " + p(out) + " --formulation ssndrm --warm-start --lp --explain") ==
          0);
  for (const char* f : {"solution-ssndrm.json", "solve_log-ssndrm.json", "stage_log-ssndrm.json", "audit-ssndrm.json",
                        "metrics-ssndrm.json", "model-ssndrm.lp", "rows-ssndrm.json", "manifest.json"})
    CHECK_MESSAGE(fs::exists(out / f), f);
  auto audit = readJson(out / "audit-ssndrm.json");
  CHECK(audit["ok"] == true);
  auto manifest = readJson(out / "manifest.json");
  CHECK(manifest["tool"] == "railplan");

  fs::path sol = out / "solution-ssndrm.json";
  CHECK(run("audit --instance " + p(inst) + " --solution " + p(sol) + " --out " + p(kWork / "a1.json")) == 0);

  // push one built block over its flow
  auto s = readJson(sol);
  bool changed = false;
  for (auto& [name, v] : s["values"].items())
    if (name.rfind("y_", 0) == 0) {
      v = 0.0;
      changed = true;
    }
  if (changed) {
    std::ofstream(kWork / "bad.json") << s.dump();
    CHECK(run("audit --instance " + p(inst) + " --solution " + p(kWork / "bad.json") + " --out " +
              p(kWork / "a2.json")) == 3);
  }
}

TEST_CASE_FIXTURE(Workspace, "usage errors") {
  std::string err;
  CHECK(run("solve --no-such-flag", &err) == 1);
  CHECK(run("", &err) == 1);
  CHECK(run("solve --instance " + p(kWork / "missing.json"), &err) == 1);
  auto e = nlohmann::json::parse(err);
  CHECK(e["exitCode"] == 1);
  CHECK(e.contains("message"));
  std::ofstream(kWork / "broken.json") << "{ not json";
  CHECK(run("solve --instance " + p(kWork / "broken.json"), &err) == 1);
}

TEST_CASE_FIXTURE(Workspace, "config file with flag override") {
  REQUIRE(run("generate --out " + p(kWork / "gen") + " --seed 2 " + kSmall) == 0);
  std::ofstream(kWork / "cfg.json") << R"({"formulation": "uf", "gap": 0.0})";
  fs::path inst = kWork / "gen" / "instance-2.json";
  REQUIRE(run("--config " + p(kWork / "cfg.json") + " solve --instance " + p(inst) + " --out " + p(kWork / "r1")) == 0);
  CHECK(fs::exists(kWork / "r1" / "solution-uf.json"));
  REQUIRE(run("--config " + p(kWork / "cfg.json") + " solve --instance " + p(inst) + " --out " + p(kWork / "r2") +
              " --formulation ul") == 0);
  CHECK(fs::exists(kWork / "r2" / "solution-ul.json"));
}

TEST_CASE_FIXTURE(Workspace, "compare and sweep") {
  REQUIRE(run("generate --out " + p(kWork / "gen") + " --seed 3 " + kSmall) == 0);
  fs::path inst = kWork / "gen" / "instance-3.json";
  REQUIRE(run("compare --instance " + p(inst) + " --out " + p(kWork / "cmp")) == 0);
  CHECK(fs::exists(kWork / "cmp" / "model_comparison.csv"));

  REQUIRE(run("sweep --out " + p(kWork / "sweep") + " --scenarios 1-7 --seeds 5 --formulations ssndrm --workers 4 " +
              kSmall + " --od-pairs 2") == 0);
  std::ifstream in(kWork / "sweep" / "runs.csv");
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 35);
}
