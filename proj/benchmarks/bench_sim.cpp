#include <benchmark/benchmark.h>

#include "dcn/builders.hpp"
#include "dcn/crossbar.hpp"
#include "dcn/flit_sim.hpp"
#include "dcn/flow_model.hpp"

using namespace dcn;

// 10k cycles per iteration at the given rate (percent).
static void BM_SimFatTree(benchmark::State& state) {
  const auto t = build_fat_tree(4);
  SimConfig cfg;
  cfg.injection_rate = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(run_simulation(t, RoutingMode::Random, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.sim_cycles));
}
BENCHMARK(BM_SimFatTree)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_SimDCell(benchmark::State& state) {
  const auto t = build_dcell(4, 1);
  SimConfig cfg;
  cfg.injection_rate = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(run_simulation(t, RoutingMode::Random, cfg));
}
BENCHMARK(BM_SimDCell)->Unit(benchmark::kMillisecond);

static void BM_Crossbar(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(crossbar_saturation_micro(static_cast<std::uint32_t>(state.range(0)), 10'000, 1));
}
BENCHMARK(BM_Crossbar)->Arg(8)->Arg(32);

static void BM_BisectionTest(benchmark::State& state) {
  const auto t = build_fat_tree(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bisection_test(t, FlowRouting::ConflictMinimizing));
}
BENCHMARK(BM_BisectionTest)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
