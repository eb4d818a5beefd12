#include <benchmark/benchmark.h>

#include "railplan/generator.hpp"
#include "railplan/instance_io.hpp"
#include "railplan/oracle.hpp"
#include "railplan/pipeline.hpp"

using namespace railplan;

namespace {

Instance deskInstance(int terminals, int services, int odPairs) {
  DeskParams p;
  p.size.terminals = terminals;
  p.size.services = services;
  p.odPairs = odPairs;
  return applyFleetScenario(generateDeskInstance(p, 11), 4);
}

void BM_Generate(benchmark::State& st) {
  DeskParams p;
  p.size.terminals = static_cast<int>(st.range(0));
  p.size.services = static_cast<int>(st.range(0)) + 1;
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(generateDeskInstance(p, ++seed));
}
BENCHMARK(BM_Generate)->Arg(5)->Arg(10)->Arg(14);

void BM_SaveLoad(benchmark::State& st) {
  Instance in = deskInstance(5, 6, 10);
  for (auto _ : st) benchmark::DoNotOptimize(parseInstance(saveInstance(in)));
}
BENCHMARK(BM_SaveLoad);

void BM_Network(benchmark::State& st) {
  Instance in = deskInstance(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), 10);
  for (auto _ : st) benchmark::DoNotOptimize(buildNetwork(in));
}
BENCHMARK(BM_Network)->Args({5, 6})->Args({10, 20})->Args({14, 40});

void BM_Blocks(benchmark::State& st) {
  Instance in = deskInstance(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), 10);
  TimeSpaceNetwork net = buildNetwork(in);
  BlockLimits lim;
  lim.maxTransfers = static_cast<int>(st.range(2));
  std::size_t n = 0;
  for (auto _ : st) {
    auto cat = generateBlocks(in, net, lim);
    n = cat.blocks.size();
    benchmark::DoNotOptimize(cat);
  }
  st.counters["blocks"] = static_cast<double>(n);
}
BENCHMARK(BM_Blocks)->Args({5, 6, 2})->Args({5, 6, 4})->Args({10, 20, 2})->Unit(benchmark::kMillisecond);

void BM_BuildFormulation(benchmark::State& st) {
  Prepared p = prepare(deskInstance(5, 6, 10));
  const Formulation f = kFormulations[st.range(0)];
  for (auto _ : st) benchmark::DoNotOptimize(buildFormulation(f, p.inst, p.cat, p.net));
  st.SetLabel(toString(f));
}
BENCHMARK(BM_BuildFormulation)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_Relaxation(benchmark::State& st) {
  Prepared p = prepare(deskInstance(5, 6, 10));
  BuiltModel m = buildFormulation(Formulation::SsndRm, p.inst, p.cat, p.net);
  milp::ModelSpec lp = milp::relaxAll(m.model);
  auto backend = milp::makeBackend();
  for (auto _ : st) benchmark::DoNotOptimize(backend->solve(lp, {}));
}
BENCHMARK(BM_Relaxation)->Unit(benchmark::kMillisecond);

void BM_WarmStart(benchmark::State& st) {
  Instance in = deskInstance(5, 6, 10);
  if (st.range(0)) in = duplicateAsExtras(in);
  Prepared p = prepare(in);
  BuiltModel m = buildFormulation(Formulation::SsndRm, p.inst, p.cat, p.net);
  auto backend = milp::makeBackend();
  WarmStartConfig cfg = warmStartConfigFor(p.inst.config);
  for (auto _ : st) benchmark::DoNotOptimize(computeWarmStart(m, cfg, *backend));
  st.SetLabel(st.range(0) ? "extras" : "regular");
}
BENCHMARK(BM_WarmStart)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_CountingFeasible(benchmark::State& st) {
  auto cars = standardRailcars();
  std::vector<RailcarType> pick{cars[1], cars[3], cars[5]};
  for (auto _ : st)
    for (int a = 0; a <= 6; ++a)
      for (int b = 0; a + b <= 6; ++b) benchmark::DoNotOptimize(oracle::countingFeasible({a, b}, pick));
}
BENCHMARK(BM_CountingFeasible);

}  // namespace

BENCHMARK_MAIN();
