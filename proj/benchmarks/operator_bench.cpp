#include <benchmark/benchmark.h>

#include "oscsing/operator.hpp"
#include "oscsing/sampled.hpp"

namespace {

const oscsing::KernelSpec kKernel{oscsing::PhasePair::power(3.0), 1e-2, 0.0};

void BM_HatWeights(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(oscsing::hat_weights(kKernel, h).data());
}
BENCHMARK(BM_HatWeights)->Arg(1000)->Arg(4000)->Arg(16000)->Unit(benchmark::kMillisecond);

void BM_ApplyFast(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const auto f = oscsing::smooth_bump(0.0, 0.25, -0.5, 0.5, h);
  for (auto _ : state) {
    const auto r = oscsing::apply_operator(kKernel, f, oscsing::OperatorMethod::Fast);
    benchmark::DoNotOptimize(r.tf.samples.data());
  }
}
BENCHMARK(BM_ApplyFast)->Arg(1000)->Arg(4000)->Arg(16000)->Unit(benchmark::kMillisecond);

void BM_ApplyDirect(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const auto f = oscsing::smooth_bump(0.0, 0.25, -0.1, 0.1, h);
  for (auto _ : state) {
    const auto r = oscsing::apply_operator(kKernel, f, oscsing::OperatorMethod::Direct);
    benchmark::DoNotOptimize(r.tf.samples.data());
  }
}
BENCHMARK(BM_ApplyDirect)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
