#include <benchmark/benchmark.h>

#include "mrt/mrt.hpp"

using namespace mrt;

namespace {

const RandomCoefficientPopulation kPop = RandomCoefficientPopulation::reference();

void BM_ShareQuadrature(benchmark::State& state) {
  const AnalyticQuadrature q{static_cast<std::size_t>(state.range(0))};
  double p = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rc_irrational_share(kPop, Budget::two_good(p, 1.5), q));
    p = p < 1.0 ? p + 0.01 : 0.1;
  }
}
BENCHMARK(BM_ShareQuadrature)->Arg(16)->Arg(64)->Arg(256);

// One 64 x 64 map, the size the reference experiment uses.
void BM_ShareMap64(benchmark::State& state) {
  set_thread_count(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    std::vector<double> out(64 * 64);
    parallel_for(out.size(), [&](std::size_t i) {
      const double p = 0.1 + 0.9 * static_cast<double>(i % 64) / 63.0;
      const double y = 1.0 + static_cast<double>(i / 64) / 63.0;
      out[i] = rc_irrational_share(kPop, Budget::two_good(p, y));
    });
    benchmark::DoNotOptimize(out.data());
  }
  set_thread_count(0);
}
BENCHMARK(BM_ShareMap64)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ClosedFormMoments(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(rc_closed_form_moments(kPop, Budget::two_good(0.5, 1.5), order));
}
BENCHMARK(BM_ClosedFormMoments)->Arg(1)->Arg(3);

void BM_MonteCarloMoments(benchmark::State& state) {
  const RandomCoefficientSampler s(kPop);
  const MonteCarloOptions o{static_cast<std::uint64_t>(state.range(0)), 1};
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_moments(s, Budget::two_good(0.5, 1.5), 3, o));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloMoments)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
