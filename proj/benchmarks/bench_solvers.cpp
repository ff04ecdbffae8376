#include <benchmark/benchmark.h>

#include <random>

#include "wbary/barycenter.hpp"
#include "wbary/multimarginal.hpp"
#include "wbary/transport.hpp"

using namespace wbary;

namespace {

DiscreteMeasure random_measure(std::mt19937_64& g, std::size_t dim, std::size_t n, bool uniform = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DiscreteMeasure m;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Point x(dim);
    for (auto& c : x) c = u(g);
    m.atoms.push_back(std::move(x));
    m.weights.push_back(uniform ? 1.0 : 0.1 + u(g));
    sum += m.weights.back();
  }
  for (auto& w : m.weights) w /= sum;
  return m;
}

void BM_Transport2D(benchmark::State& state) {
  std::mt19937_64 g(7);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Space s = Space::euclidean(2);
  const DiscreteMeasure a = random_measure(g, 2, n), b = random_measure(g, 2, n);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein(s, 2.0, a, b).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Transport2D)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BM_Quantile1D(benchmark::State& state) {
  std::mt19937_64 g(8);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Space s = Space::euclidean(1);
  const DiscreteMeasure a = random_measure(g, 1, n), b = random_measure(g, 1, n);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_1d(s, 2.0, a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Quantile1D)->RangeMultiplier(4)->Range(16, 16384)->Complexity(benchmark::oNLogN);

// args: atoms per measure, number of measures
void BM_Multimarginal1D(benchmark::State& state) {
  std::mt19937_64 g(9);
  MeasureEnsemble e;
  e.space = Space::euclidean(1);
  for (int j = 0; j < state.range(1); ++j)
    e.measures.push_back(random_measure(g, 1, static_cast<std::size_t>(state.range(0)), true));
  e.lambda.assign(e.measures.size(), 1.0 / static_cast<double>(e.measures.size()));
  for (auto _ : state) benchmark::DoNotOptimize(solve_multimarginal(e.space, 2.0, e).objective);
}
BENCHMARK(BM_Multimarginal1D)->Args({6, 3})->Args({12, 3})->Args({20, 3})->Args({8, 4})->Args({16, 4})
    ->Unit(benchmark::kMillisecond);

void BM_Multimarginal2D_p1(benchmark::State& state) {
  std::mt19937_64 g(10);
  MeasureEnsemble e;
  e.space = Space::euclidean(2);
  for (int j = 0; j < 3; ++j) e.measures.push_back(random_measure(g, 2, static_cast<std::size_t>(state.range(0))));
  e.lambda = {0.2, 0.3, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(solve_multimarginal(e.space, 1.0, e).objective);
}
BENCHMARK(BM_Multimarginal2D_p1)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
