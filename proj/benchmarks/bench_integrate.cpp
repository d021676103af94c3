#include <benchmark/benchmark.h>

#include <numbers>

#include "rpsde/integrate.hpp"

namespace {

using namespace rpsde;

const GridSpec kGrid = GridSpec::from_dt(2.0 * std::numbers::pi, 1e-2);

void BM_EulerStepCubic(benchmark::State& state) {
  const auto model = build_cubic_scalar({0.5, 1.0});
  Stepper stepper(model, kGrid, Scheme::euler);
  std::vector<double> x{0.3};
  std::vector<double> dw{0.01};
  std::int64_t k = 0;
  for (auto _ : state) {
    stepper.step(k++, x, dw);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EulerStepCubic);

void BM_MilsteinStepCubic(benchmark::State& state) {
  const auto model = build_cubic_scalar({0.5, 1.0});
  Stepper stepper(model, kGrid, Scheme::milstein);
  std::vector<double> x{0.3};
  std::vector<double> dw{0.01};
  std::int64_t k = 0;
  for (auto _ : state) {
    stepper.step(k++, x, dw);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MilsteinStepCubic);

void BM_IntegrateOnePeriod(benchmark::State& state) {
  const auto model = build_cubic_scalar({0.5, 1.0});
  const NoisePath path(3, 1, kGrid);
  const std::vector<double> x0{1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_final(model, path, 0, kGrid.steps_per_period(), x0));
  }
  state.SetItemsProcessed(state.iterations() * kGrid.steps_per_period());
}
BENCHMARK(BM_IntegrateOnePeriod);

}  // namespace
