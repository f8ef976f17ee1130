#include <map>

#include <benchmark/benchmark.h>

#include "mrt/mrt.hpp"

using namespace mrt;

namespace {

const CrossSection& data(std::size_t n) {
  static const RandomCoefficientSampler s(RandomCoefficientPopulation::reference());
  static std::map<std::size_t, CrossSection> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, generate_cross_section(s, BudgetLaw{}, n, 0.05, 11)).first;
  return it->second;
}

void BM_LocalLinear(benchmark::State& state) {
  const CrossSection& d = data(static_cast<std::size_t>(state.range(0)));
  const Bandwidth bw = silverman_bandwidth(d);
  for (auto _ : state)
    benchmark::DoNotOptimize(local_linear_moments(d, Budget::two_good(0.5, 1.5), {1, 2, 3}, bw));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LocalLinear)->Arg(2000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void BM_ProjectOntoB0(benchmark::State& state) {
  const std::vector<int> orders = {1, 2, 3};
  Vector beta(6);
  beta << 0.3, -0.2, 0.5, 0.1, -0.4, 0.6;
  const Matrix V = Matrix::Identity(6, 6) * 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(project_onto_B0(beta, V, 0.05, orders));
}
BENCHMARK(BM_ProjectOntoB0);

void BM_EbEstimate(benchmark::State& state) {
  const CrossSection& d = data(2000);
  EbOptions o;
  o.n_boot = static_cast<std::size_t>(state.range(0));
  o.seed = 3;
  for (auto _ : state) benchmark::DoNotOptimize(eb_estimate(d, Budget::two_good(0.5, 1.5), o));
}
BENCHMARK(BM_EbEstimate)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
