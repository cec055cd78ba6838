#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "netweave/baselines.hpp"
#include "netweave/homophily.hpp"
#include "netweave/metrics.hpp"

using namespace netweave;

namespace {

DirectedNetwork er(std::size_t n) { return generate_er(n, 0.19, 1); }

void BM_Clustering(benchmark::State& state) {
  const auto g = er(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(avg_clustering(g));
}
BENCHMARK(BM_Clustering)->Arg(50)->Arg(200)->Arg(1000);

void BM_AvgPath(benchmark::State& state) {
  const auto g = er(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(avg_path(g));
}
BENCHMARK(BM_AvgPath)->Arg(50)->Arg(200)->Arg(1000);

void BM_Modularity(benchmark::State& state) {
  const auto g = er(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(modularity(g));
}
BENCHMARK(BM_Modularity)->Arg(50)->Arg(200);

void BM_ComputeMetrics(benchmark::State& state) {
  const auto g = er(50);
  for (auto _ : state) benchmark::DoNotOptimize(compute_metrics(g));
}
BENCHMARK(BM_ComputeMetrics);

void BM_HomophilyProfile(benchmark::State& state) {
  const Roster r = fixture::canonical_roster();
  const auto g = er(50);
  for (auto _ : state) benchmark::DoNotOptimize(homophily_profile(g, r));
}
BENCHMARK(BM_HomophilyProfile);

void BM_Baseline(benchmark::State& state) {
  const auto family = static_cast<BaselineFamily>(state.range(0));
  BaselineParams p;
  p.family = family;
  p.p = 0.19;
  p.m = 5;
  p.k_ring = 10;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_baseline(p, 50, seed++));
  state.SetLabel(std::string(family_name(family)));
}
BENCHMARK(BM_Baseline)->DenseRange(0, 2);

}  // namespace
