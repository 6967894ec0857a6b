#include <benchmark/benchmark.h>

#include "ddae/response.hpp"

namespace {

ddae::DdaeSystem sys_a() {
  ddae::Matrix E = ddae::Matrix::Zero(2, 2), A0(2, 2), A1 = ddae::Matrix::Zero(2, 2), A2 = ddae::Matrix::Zero(2, 2);
  E(0, 0) = 1;
  A0 << 0, 1, -1, -1;
  A1(1, 1) = 0.25;
  A2(1, 1) = -0.5;
  ddae::Matrix B(2, 1), C(1, 2);
  B << 0, 1;
  C << 2, 1;
  return ddae::DdaeSystem(E, {A0, A1, A2}, B, C, {1.0, 2.0});
}

ddae::DdaeSystem random_system(int n) {
  ddae::Matrix E = ddae::Matrix::Identity(n, n);
  E(n - 1, n - 1) = 0;
  const ddae::Matrix A0 = ddae::Matrix::Random(n, n) - 3.0 * ddae::Matrix::Identity(n, n);
  const ddae::Matrix A1 = 0.1 * ddae::Matrix::Random(n, n);
  return ddae::DdaeSystem(E, {A0, A1}, ddae::Matrix::Random(n, 2), ddae::Matrix::Random(2, n), {1.3});
}

void BM_EvalT_SysA(benchmark::State& state) {
  const auto sys = sys_a();
  double w = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ddae::eval_T(sys, w));
    w += 1e-3;
  }
}
BENCHMARK(BM_EvalT_SysA);

void BM_EvalT_Dense(benchmark::State& state) {
  const auto sys = random_system(static_cast<int>(state.range(0)));
  double w = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ddae::eval_T(sys, w));
    w += 1e-3;
  }
}
BENCHMARK(BM_EvalT_Dense)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_SweepLog(benchmark::State& state) {
  const auto sys = sys_a();
  const auto grid = ddae::FrequencyGrid::parse("log:0.01:10000:" + std::to_string(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ddae::sweep(sys, grid, ddae::Quantity::T));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SweepLog)->Arg(2001)->Arg(20001)->Unit(benchmark::kMillisecond);

void BM_SweepTorus(benchmark::State& state) {
  const auto dec = ddae::decompose(sys_a());
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ddae::sweep_torus(dec, n));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_SweepTorus)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace
