#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "frontlab/coeffs.hpp"
#include "frontlab/pde.hpp"
#include "frontlab/r0.hpp"
#include "frontlab/semiwave.hpp"
#include "frontlab/stefan.hpp"

using namespace frontlab;

namespace {

const CoefficientField kBump =
    CoefficientField::separable_bump(1.0, RateParams{1.8, 0.4, 0.0, 0.8, 1.0, 0.5}, RateParams{1.0, 0.2});

void BM_Monodromy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  LinearProblemSpec spec;
  spec.alpha = 0.5;
  spec.potential = [](double x, double t) { return kBump.beta(x, t) - kBump.gamma(x, t); };
  const auto u0 = FieldOnGrid::sample(Grid1D::make(-2.0, 2.0, n), [](double x) { return std::cos(std::numbers::pi * x / 4.0); });
  for (auto _ : state) benchmark::DoNotOptimize(monodromy_apply(u0, spec, 1.0, 256));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Monodromy)->RangeMultiplier(2)->Range(101, 1601)->Complexity(benchmark::oN);

void BM_R0Floquet(benchmark::State& state) {
  EigenOptions eo;
  eo.grid_n = static_cast<int>(state.range(0));
  eo.compute_lambda0 = false;
  for (auto _ : state) benchmark::DoNotOptimize(r0_floquet(kBump, 1.0, 0.5, {-2.0, 2.0}, eo).value);
}
BENCHMARK(BM_R0Floquet)->Arg(201)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_R0Variational(benchmark::State& state) {
  const auto f = CoefficientField::space_only(RateParams{1.8, 0.0, 0.0, 0.8}, RateParams{1.0});
  for (auto _ : state) benchmark::DoNotOptimize(r0_variational(f, 1.0, 0.5, {-2.0, 2.0}).value);
}
BENCHMARK(BM_R0Variational)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  ModelParams p;
  p.h0 = 2.0;
  p.alpha = 0.5;
  p.grid_n = static_cast<int>(state.range(0));
  p.dt = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(p, kBump, InitialDatum{}, 20.0).h.back());
}
BENCHMARK(BM_Simulate)->Arg(201)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_Semiwave(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(semiwave_autonomous(1.0, 0.5, 1.0, 1.0, 1.0, 1e-8).k_bar);
}
BENCHMARK(BM_Semiwave)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
