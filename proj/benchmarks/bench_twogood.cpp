#include <benchmark/benchmark.h>

#include "mrt/mrt.hpp"

using namespace mrt;

namespace {

BernsteinTranslations translations_at(int degree) {
  const auto pop = RandomCoefficientPopulation::reference();
  const Budget b = Budget::two_good(0.5, 1.5);
  const SupportBounds sb = rc_support_bounds(pop, b);
  return bernstein_translations_from_gammas([&](int n) { return rc_gamma_exact(pop, b, n); },
                                            degree, Support::of(sb));
}

void BM_BernsteinLp(benchmark::State& state) {
  const BernsteinTranslations bt = translations_at(static_cast<int>(state.range(0)));
  const LpTestOptions o{static_cast<int>(state.range(1)), 1e-8, LpVariant::AllGridPoints};
  for (auto _ : state) benchmark::DoNotOptimize(bernstein_lp_test(bt, o));
}
BENCHMARK(BM_BernsteinLp)->Args({1, 101})->Args({2, 101})->Args({2, 401})->Unit(benchmark::kMicrosecond);

// Point-mass vector: the optimum is 0 with many rows tight at once.
void BM_BernsteinLpDegenerate(benchmark::State& state) {
  const int n = 4;
  BernsteinTranslations bt;
  bt.degree = n;
  bt.lambdas = bernstein_basis(n, 0.37);
  for (double& l : bt.lambdas) l *= -5.0;
  bt.standard_errors.assign(n + 1, 0.0);
  const LpTestOptions o{static_cast<int>(state.range(0)), 1e-8, LpVariant::AllGridPoints};
  for (auto _ : state) benchmark::DoNotOptimize(bernstein_lp_test(bt, o));
}
BENCHMARK(BM_BernsteinLpDegenerate)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_QuantileRestriction(benchmark::State& state) {
  const auto pop = RandomCoefficientPopulation::reference();
  const QuantileFn f = QuantileFn::closed_form(pop, Budget::two_good(0.5, 1.5));
  double tau = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.restriction(tau));
    tau = tau < 0.99 ? tau + 0.01 : 0.01;
  }
}
BENCHMARK(BM_QuantileRestriction);

void BM_EmpiricalQuantileFn(benchmark::State& state) {
  const RandomCoefficientSampler s(RandomCoefficientPopulation::reference());
  for (auto _ : state)
    benchmark::DoNotOptimize(
        empirical_quantile_fn(s, Budget::two_good(0.5, 1.5), static_cast<std::uint64_t>(state.range(0)), 3));
}
BENCHMARK(BM_EmpiricalQuantileFn)->Arg(20000)->Arg(1000000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
