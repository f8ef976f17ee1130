#include <benchmark/benchmark.h>

#include "mrt/mrt.hpp"

using namespace mrt;

namespace {

std::shared_ptr<CobbDouglasMixtureSampler> three_good_mixture() {
  Vector a(3), b(3), c(3);
  a << 0.2, 0.3, 0.1;
  b << 0.1, 0.2, 0.4;
  c << 0.3, 0.1, 0.2;
  return cobb_douglas_mixture_sampler({a, b, c}, {0.3, 0.3, 0.4});
}

Budget three_good_budget() {
  Vector p(3);
  p << 0.5, 0.8, 1.2;
  return Budget(p, 2.0);
}

void BM_TensorMomentsMonteCarlo(benchmark::State& state) {
  const auto s = three_good_mixture();
  TensorMomentOptions o;
  o.max_order = static_cast<int>(state.range(0));
  o.draws = 100000;
  o.seed = 5;
  for (auto _ : state) benchmark::DoNotOptimize(tensor_moments_monte_carlo(*s, three_good_budget(), o));
}
BENCHMARK(BM_TensorMomentsMonteCarlo)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_TensorMomentsEnumerated(benchmark::State& state) {
  const auto s = three_good_mixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(tensor_moments_enumerated(*s, three_good_budget(), static_cast<int>(state.range(0))));
}
BENCHMARK(BM_TensorMomentsEnumerated)->Arg(1)->Arg(3);

void BM_TensorNsd(benchmark::State& state) {
  const auto s = three_good_mixture();
  const int n = static_cast<int>(state.range(0));
  const TensorMomentSet tm = tensor_moments_enumerated(*s, three_good_budget(), n);
  const SymmetricTensor T = higher_tensor_restriction(tm, n);
  for (auto _ : state) benchmark::DoNotOptimize(nsd_check_tensor(T));
}
BENCHMARK(BM_TensorNsd)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Normativity(benchmark::State& state) {
  const auto s = three_good_mixture();
  const TensorMomentSet tm = tensor_moments_enumerated(*s, three_good_budget(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(normativity_distance(tm));
}
BENCHMARK(BM_Normativity);

}  // namespace

BENCHMARK_MAIN();
