#include <benchmark/benchmark.h>

#include <map>

#include "cascade/dynamics.hpp"
#include "cascade/graph.hpp"

using namespace cascade;

namespace {

const Graph& scale_free_graph(std::uint64_t n) {
  static std::map<std::uint64_t, Graph> cache;
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, generate_scale_free(NetworkSpec::scale_free(n, 2.5, 10 * n, 7)))
             .first;
  return it->second;
}

}  // namespace

static void BM_StepScaleFree(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const Graph& graph = scale_free_graph(n);
  SimConfig config;
  config.q = 1e-4 * 1e6 / static_cast<double>(n); // keep qN = 100
  config.seed = 11;
  Simulator sim(graph, config);
  for (std::uint64_t i = 0; i < 20 * n; ++i) sim.step(); // reach the cycling regime
  for (auto _ : state) {
    auto event = sim.step();
    benchmark::DoNotOptimize(event);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepScaleFree)->Arg(100'000)->Arg(1'000'000);

static void BM_StepLattice(benchmark::State& state) {
  const auto l = static_cast<std::uint32_t>(state.range(0));
  static std::map<std::uint32_t, Graph> cache;
  auto it = cache.find(l);
  if (it == cache.end())
    it = cache.emplace(l, generate_square_lattice(NetworkSpec::lattice(l, true, 3))).first;
  SimConfig config;
  config.q = 0.7;
  config.seed = 5;
  Simulator sim(it->second, config);
  for (std::uint64_t i = 0; i < 30ULL * l * l; ++i) sim.step();
  for (auto _ : state) {
    auto event = sim.step();
    benchmark::DoNotOptimize(event);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepLattice)->Arg(128)->Arg(256);

static void BM_BurnGiantCluster(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const Graph& graph = scale_free_graph(n);
  SimConfig config;
  config.q = 100.0 / static_cast<double>(n);
  config.seed = 13;
  Simulator sim(graph, config);
  Rng rng(17);
  for (auto _ : state) {
    state.PauseTiming();
    // occupy 10% of the nodes, then burn the cluster of a vulnerable node
    std::uint32_t any = 0;
    for (std::uint64_t i = 0; i < n / 10; ++i) {
      const auto v = static_cast<std::uint32_t>(rng.below(n));
      sim.set_vulnerable(v, true);
      any = v;
    }
    state.ResumeTiming();
    benchmark::DoNotOptimize(sim.burn_cluster(any));
    state.PauseTiming();
    // clear the rest
    while (sim.num_vulnerable() > 0)
      for (std::uint32_t v = 0; v < n; ++v)
        if (sim.vulnerable(v)) sim.burn_cluster(v);
    state.ResumeTiming();
  }
}
BENCHMARK(BM_BurnGiantCluster)->Arg(100'000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
