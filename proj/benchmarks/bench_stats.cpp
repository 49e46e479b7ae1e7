#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "cascade/rng.hpp"
#include "cascade/scaling.hpp"
#include "cascade/stats.hpp"

using namespace cascade;

namespace {

HistogramMeta bench_meta(std::uint64_t nodes) {
  HistogramMeta meta;
  meta.nodes = nodes;
  meta.gamma = 2.5;
  meta.q = 1e-4;
  return meta;
}

std::vector<std::uint32_t> power_law_sizes(std::size_t count) {
  Rng rng(42);
  std::vector<std::uint32_t> sizes;
  sizes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.u01();
    sizes.push_back(1 + static_cast<std::uint32_t>(std::pow(1.0 - u, -1.0 / 1.5)));
  }
  return sizes;
}

}  // namespace

static void BM_LogBin(benchmark::State& state) {
  const auto sizes = power_law_sizes(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const auto dist = BinnedDistribution::from_sizes(sizes, 10, bench_meta(1'000'000));
    benchmark::DoNotOptimize(dist.num_bins());
  }
  state.SetItemsProcessed(state.iterations() * sizes.size());
}
BENCHMARK(BM_LogBin)->Arg(100'000)->Arg(1'000'000);

static void BM_Merge(benchmark::State& state) {
  const auto sizes = power_law_sizes(500'000);
  const auto a = BinnedDistribution::from_sizes(sizes, 10, bench_meta(1'000'000));
  for (auto _ : state) {
    const auto merged = merge(a, a);
    benchmark::DoNotOptimize(merged.total_events());
  }
}
BENCHMARK(BM_Merge);

static void BM_CollapseErrorEval(benchmark::State& state) {
  // three synthetic datasets, one objective evaluation (both regions)
  std::vector<BinnedDistribution> dists;
  for (std::uint64_t n : {100'000ULL, 316'228ULL, 1'000'000ULL}) {
    std::vector<std::uint64_t> counts;
    const double s_c1 = 1.2 * std::pow(double(n), 0.5), s_c2 = 0.06 * double(n);
    for (std::size_t k = 0;; ++k) {
      const double lo = BinnedDistribution::edge(10, k);
      if (lo > 4 * s_c2) break;
      const double s = std::sqrt(lo * BinnedDistribution::edge(10, k + 1));
      const double f = (std::pow(s, -2.5) +
                        std::pow(s_c1, -2.5) * std::pow(s / s_c1, 0.8)) *
                       std::exp(-std::pow(s / s_c2, 4.0));
      counts.push_back(
          static_cast<std::uint64_t>(f * (BinnedDistribution::edge(10, k + 1) - lo) * 1e15));
    }
    dists.push_back(BinnedDistribution::from_counts(10, counts, bench_meta(n)));
  }
  for (auto _ : state) {
    const double err = collapse_error(dists, 2.5, 0.5, 0.8, Region::Lower) +
                       collapse_error(dists, 2.5, 0.5, 0.8, Region::Upper);
    benchmark::DoNotOptimize(err);
  }
}
BENCHMARK(BM_CollapseErrorEval)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
