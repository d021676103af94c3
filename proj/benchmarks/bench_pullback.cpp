#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "rpsde/measures.hpp"
#include "rpsde/pullback.hpp"

namespace {

using namespace rpsde;

const GridSpec kGrid = GridSpec::from_dt(2.0 * std::numbers::pi, 1e-2);

void BM_RandomPeriodicPath(benchmark::State& state) {
  const auto model = build_cubic_scalar({0.5, 1.0});
  const double tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const NoisePath path(seed++, 1, kGrid);
    benchmark::DoNotOptimize(random_periodic_path(model, path, 0, std::vector{0.0}, tol, 200));
  }
}
BENCHMARK(BM_RandomPeriodicPath)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_PeriodicMeasure(benchmark::State& state) {
  const auto model = build_cubic_scalar({0.5, 1.0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_periodic_measure(model, kGrid, 5, 0,
                                                     static_cast<std::size_t>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PeriodicMeasure)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
