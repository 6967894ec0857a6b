#include <benchmark/benchmark.h>

#include "ddae/norms.hpp"

namespace {

ddae::DdaeSystem sys_family(double c) {
  ddae::Matrix E = ddae::Matrix::Zero(2, 2), A0(2, 2), A1 = ddae::Matrix::Zero(2, 2), A2 = ddae::Matrix::Zero(2, 2);
  E(0, 0) = 1;
  A0 << 0, 1, -1, -1;
  A1(1, 1) = c;
  A2(1, 1) = -0.5;
  ddae::Matrix B(2, 1), C(1, 2);
  B << 0, 1;
  C << 2, 1;
  return ddae::DdaeSystem(E, {A0, A1, A2}, B, C, {1.0, 2.0});
}

void BM_StrongNormTa(benchmark::State& state) {
  const auto dec = ddae::decompose(sys_family(0.25));
  ddae::TorusOptions opts;
  opts.grid_per_dim = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ddae::strong_norm_Ta(dec, opts));
}
BENCHMARK(BM_StrongNormTa)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_FrequencyBound(benchmark::State& state) {
  const auto dec = ddae::decompose(sys_family(0.25));
  for (auto _ : state) benchmark::DoNotOptimize(ddae::frequency_bound(dec, 4.0));
}
BENCHMARK(BM_FrequencyBound)->Unit(benchmark::kMillisecond);

// Reduced budget so a run stays in seconds.
void BM_HinfCapped(benchmark::State& state) {
  const auto sys = sys_family(0.25);
  const auto dec = ddae::decompose(sys);
  ddae::HinfOptions opts;
  opts.omega_cap = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ddae::hinf_norm_T(sys, dec, sys.delays(), opts));
}
BENCHMARK(BM_HinfCapped)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
