#include <benchmark/benchmark.h>

#include <memory>

#include "hkbounds/bootstrap.hpp"
#include "hkbounds/kernel.hpp"
#include "hkbounds/spectral.hpp"
#include "hkbounds/test_functions.hpp"

namespace {

using namespace hkb;

DiscreteOperator laplacian(int n, int m = 1) {
  return build_operator({m, 1, Coefficient::constant(1.0)}, Grid(Domain::interval(0.0, 1.0), n));
}

void BM_DenseEigen(benchmark::State& state) {
  const auto op = laplacian(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(op));
}
BENCHMARK(BM_DenseEigen)->Args({400, 1})->Args({1000, 1})->Args({2000, 1})->Args({400, 2})->Unit(benchmark::kMillisecond);

void BM_PartialEigen(benchmark::State& state) {
  const auto op = laplacian(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(op, 10));
}
BENCHMARK(BM_PartialEigen)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_HeatKernel(benchmark::State& state) {
  const auto op = laplacian(1000);
  const auto sd = std::make_shared<const SpectralDecomposition>(eigendecompose(op));
  const KernelEvaluator ev(sd);
  const double t = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ev.diagonal(t, 500));
}
BENCHMARK(BM_HeatKernel)->DenseRange(1, 4);

void BM_ResolventFactor(benchmark::State& state) {
  const auto op = laplacian(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(ResolventSolver(op, 1e-3).diagonal(10));
}
BENCHMARK(BM_ResolventFactor)->Arg(400)->Arg(2000);

void BM_Variational(benchmark::State& state) {
  const auto op = laplacian(400);
  for (auto _ : state) benchmark::DoNotOptimize(variational_green(op, 1e-3, 200));
}
BENCHMARK(BM_Variational)->Unit(benchmark::kMillisecond);

void BM_GreenHeatRhs(benchmark::State& state) {
  const auto u = UpperTemplate::power(1, 1, 0.5, 9.87, 2.0);
  const BootstrapConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(green_heat_rhs(u, 0.01, 1e-3, cfg));
}
BENCHMARK(BM_GreenHeatRhs);

void BM_DeltaStar(benchmark::State& state) {
  const auto u = UpperTemplate::power(1, 1, 0.5, 9.87, 2.0);
  const BootstrapConfig cfg;
  const double ratio = green_heat_rhs(u, 0.01, 1e-3, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(solve_delta_star(ratio, u, 0.01, cfg));
}
BENCHMARK(BM_DeltaStar);

}  // namespace

BENCHMARK_MAIN();
