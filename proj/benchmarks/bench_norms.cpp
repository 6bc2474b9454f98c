#include <benchmark/benchmark.h>

#include "mhl/falsify.hpp"
#include "mhl/norms.hpp"

using namespace mhl;

static void BM_MorreyNormGepsK(benchmark::State& state) {
  const auto g = make_g_eps_K(0.25, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) {
    auto result = morrey_norm(g, Rational(2), Rational(4));
    benchmark::DoNotOptimize(result.value);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MorreyNormGepsK)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void BM_WeakMorreyNormGepsK(benchmark::State& state) {
  const auto g = make_g_eps_K(0.25, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) {
    auto result = weak_morrey_norm(g, Rational(2), Rational(4));
    benchmark::DoNotOptimize(result.value);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WeakMorreyNormGepsK)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void BM_OracleNorm(benchmark::State& state) {
  const auto g = make_g_eps_K(0.25, 100, 1);
  OracleConfig cfg;
  cfg.radius_grid_size = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto result = oracle_norm(g, Rational(2), Rational(4), false, cfg);
    benchmark::DoNotOptimize(result.value);
  }
}
BENCHMARK(BM_OracleNorm)->RangeMultiplier(4)->Range(256, 16384);

static void BM_PDivergenceSeries(benchmark::State& state) {
  const ExponentSystem sys(ExponentPair(Rational(2), Rational(2)),
                           {{Rational(2), Rational(4)}, {Rational(2), Rational(4)}}, 1);
  const auto Ks = default_K_series(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto report = p_divergence_series(sys, Ks, 0.25);
    benchmark::DoNotOptimize(report.fitted_slope);
  }
}
BENCHMARK(BM_PDivergenceSeries)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
