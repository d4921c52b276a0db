#include <benchmark/benchmark.h>

#include "dcn/builders.hpp"
#include "dcn/metrics.hpp"
#include "dcn/routing.hpp"

using namespace dcn;

static void BM_BuildFatTree(benchmark::State& state) {
  const auto k = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_fat_tree(k));
}
BENCHMARK(BM_BuildFatTree)->Arg(4)->Arg(8)->Arg(16);

static void BM_BuildDCell(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_dcell(n, 2));
}
BENCHMARK(BM_BuildDCell)->Arg(3)->Arg(5);

static void BM_BuildJellyfish(benchmark::State& state) {
  const auto s = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_jellyfish({s, 12, 8, 1}));
}
BENCHMARK(BM_BuildJellyfish)->Arg(100)->Arg(400);

static void BM_AvgHostPath(benchmark::State& state) {
  const auto t = build_fat_tree(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(avg_host_path(t));
}
BENCHMARK(BM_AvgHostPath)->Arg(4)->Arg(8);

static void BM_BisectionExactFatTree4(benchmark::State& state) {
  const auto t = build_fat_tree(4);
  for (auto _ : state) benchmark::DoNotOptimize(bisection_bandwidth_exact(t));
}
BENCHMARK(BM_BisectionExactFatTree4)->Unit(benchmark::kMillisecond);

static void BM_BisectionHeuristicDCell(benchmark::State& state) {
  const auto t = build_dcell(6, 1);
  for (auto _ : state) benchmark::DoNotOptimize(bisection_bandwidth_heuristic(t, 8, 1));
}
BENCHMARK(BM_BisectionHeuristicDCell)->Unit(benchmark::kMillisecond);

static void BM_EcmpTables(benchmark::State& state) {
  const auto t = build_fat_tree(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_ecmp_tables(t));
}
BENCHMARK(BM_EcmpTables)->Arg(4)->Arg(8);
