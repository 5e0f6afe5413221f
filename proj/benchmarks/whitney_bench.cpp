#include <cmath>

#include <benchmark/benchmark.h>

#include "oscsing/audit.hpp"
#include "oscsing/decomposition.hpp"

namespace {

void BM_WhitneyCover(benchmark::State& state) {
  const auto p = oscsing::PhasePair::power(2.0);
  const auto w = oscsing::growth_witness(p);
  const oscsing::OpenSet omega({{0.0, std::ldexp(1.0, -10)}});
  const int k_max = static_cast<int>(state.range(0));
  std::size_t size = 0;
  for (auto _ : state) {
    const auto cover = oscsing::whitney_cover(omega, p, w, {0, k_max});
    size = cover.size();
    benchmark::DoNotOptimize(cover.runs.data());
  }
  state.counters["intervals"] = static_cast<double>(size);
}
BENCHMARK(BM_WhitneyCover)->DenseRange(28, 36, 4)->Unit(benchmark::kMicrosecond);

void BM_VerifyCover(benchmark::State& state) {
  const auto p = oscsing::PhasePair::power(2.0);
  const auto w = oscsing::growth_witness(p);
  const oscsing::OpenSet omega({{0.0, std::ldexp(1.0, -10)}});
  const auto cover = oscsing::whitney_cover(omega, p, w, {0, static_cast<int>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(oscsing::verify_cover(cover, omega).pass());
  state.counters["intervals"] = static_cast<double>(cover.size());
}
BENCHMARK(BM_VerifyCover)->DenseRange(24, 32, 4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
