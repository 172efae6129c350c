// Serial reference vs OpenMP kernels: grid sampling, the local-bound fit and
// the local-asymptotics sweep, plus a single circle scan.

#include <benchmark/benchmark.h>

#include "wvlab/exceptional.hpp"
#include "wvlab/growth.hpp"
#include "wvlab/verifier.hpp"

using namespace wvlab;

namespace {

GrowthParams params() {
  GrowthParams p;
  p.r0 = 0.3L;
  return p;
}

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void BM_CircleScan(benchmark::State& state) {
  const auto spec = FunctionSpec::exp_pole(1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(max_on_circle(spec, {}, 0.999L));
}
BENCHMARK(BM_CircleScan)->Unit(benchmark::kMillisecond);

void BM_SampleGrid(benchmark::State& state) {
  const auto spec = FunctionSpec::exp_pole(1, 1);
  const GridSpec grid{12, static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(sample_grid(spec, {}, params(), grid, {}, mode(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_SampleGrid)->Args({0, 64})->Args({1, 64})->Args({0, 256})->Args({1, 256})->Unit(benchmark::kMillisecond);

void BM_LocalBoundFit(benchmark::State& state) {
  const auto spec = FunctionSpec::power_law(2);
  const auto prof = build_profile(spec, {}, params(), GridSpec{12, 64});
  const auto E = e_set_failure(prof);
  for (auto _ : state) benchmark::DoNotOptimize(fit_local_bound(spec, {}, prof, E, {}, mode(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_LocalBoundFit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LocalAsymptoticsSweep(benchmark::State& state) {
  const auto spec = FunctionSpec::exp_pole(1, 1);
  const auto prof = build_profile(spec, {}, params(), GridSpec{12, 128});
  const auto E = e_set_failure(prof);
  for (auto _ : state) benchmark::DoNotOptimize(theorem1_sweep(spec, {}, prof, E, nullptr, {}, mode(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_LocalAsymptoticsSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
