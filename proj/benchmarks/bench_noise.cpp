#include <benchmark/benchmark.h>

#include <numbers>

#include "rpsde/noise.hpp"

namespace {

using namespace rpsde;

void BM_StandardNormal(benchmark::State& state) {
  std::int64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(standard_normal(42, 0, k++));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StandardNormal);

void BM_NoiseIncrements(benchmark::State& state) {
  const GridSpec grid = GridSpec::from_dt(2.0 * std::numbers::pi, 1e-2);
  const NoisePath path(7, static_cast<int>(state.range(1)), grid);
  const auto count = state.range(0);
  std::vector<double> out(static_cast<std::size_t>(count * state.range(1)));
  for (auto _ : state) {
    path.increments(-count, count, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * count * state.range(1));
}
BENCHMARK(BM_NoiseIncrements)->Args({1024, 1})->Args({1024, 4});

void BM_CoarsenedIncrements(benchmark::State& state) {
  const GridSpec grid(1.0, 4096);
  const NoisePath path = NoisePath(9, 1, grid).coarsened(state.range(0));
  const std::int64_t count = 256;
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto _ : state) {
    path.increments(0, count, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * count);
}
BENCHMARK(BM_CoarsenedIncrements)->Arg(1)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
