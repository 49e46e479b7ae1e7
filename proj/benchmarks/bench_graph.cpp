#include <benchmark/benchmark.h>

#include "cascade/graph.hpp"

using namespace cascade;

static void BM_GenerateScaleFree(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const Graph g = generate_scale_free(NetworkSpec::scale_free(n, 2.5, 10 * n, ++seed));
    benchmark::DoNotOptimize(g.num_links());
  }
  state.SetItemsProcessed(state.iterations() * 10 * n); // edges placed
}
BENCHMARK(BM_GenerateScaleFree)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

static void BM_GenerateLattice(benchmark::State& state) {
  const auto l = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) {
    const Graph g = generate_square_lattice(NetworkSpec::lattice(l, true, 1));
    benchmark::DoNotOptimize(g.num_links());
  }
}
BENCHMARK(BM_GenerateLattice)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_DegreeDistribution(benchmark::State& state) {
  const Graph g = generate_scale_free(NetworkSpec::scale_free(100'000, 2.5, 1'000'000, 3));
  for (auto _ : state) {
    const auto hist = degree_distribution(g);
    benchmark::DoNotOptimize(hist.counts.size());
  }
}
BENCHMARK(BM_DegreeDistribution)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
