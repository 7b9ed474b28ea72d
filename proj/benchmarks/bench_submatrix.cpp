#include <benchmark/benchmark.h>

#include "chevetlab/ensembles.hpp"
#include "chevetlab/submatrix.hpp"

namespace {

using namespace chevetlab;

Matrix exponential(int d) {
  Rng rng = substream(4, 0);
  return sample(EnsembleSpec::of(EnsembleKind::Exponential, d, d), rng);
}

void BM_GammaKmExact(benchmark::State& state) {
  const Matrix g = exponential(static_cast<int>(state.range(0)));
  const int k = static_cast<int>(state.range(1));
  SearchOptions opts;
  opts.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(gamma_km(g, k, k, SearchMode::Exact, opts).norm.value);
}
BENCHMARK(BM_GammaKmExact)->Args({16, 2})->Args({16, 3})->Args({32, 2})->Unit(benchmark::kMillisecond);

void BM_GammaKmHeuristic(benchmark::State& state) {
  const Matrix g = exponential(static_cast<int>(state.range(0)));
  const int k = static_cast<int>(state.range(1));
  SearchOptions opts;
  opts.workers = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma_km(g, k, k, SearchMode::Heuristic, opts).norm.value);
  }
}
BENCHMARK(BM_GammaKmHeuristic)->Args({32, 2})->Args({32, 8})->Args({64, 8})->Unit(benchmark::kMillisecond);

void BM_Ric(benchmark::State& state) {
  const Matrix g = exponential(static_cast<int>(state.range(0)));
  const auto mode = state.range(2) == 0 ? SearchMode::Exact : SearchMode::Heuristic;
  const int m = static_cast<int>(state.range(1));
  SearchOptions opts;
  opts.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(ric(g, m, mode, opts).delta);
}
BENCHMARK(BM_Ric)->Args({16, 3, 0})->Args({16, 3, 1})->Args({32, 4, 1})->Unit(benchmark::kMillisecond);

}  // namespace
