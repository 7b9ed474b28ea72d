#include <random>

#include <benchmark/benchmark.h>

#include "chevetlab/chaining.hpp"
#include "chevetlab/nets.hpp"

namespace {

using namespace chevetlab;

Matrix point_set(int dim, int points) {
  Rng rng = substream(5, 0);
  std::normal_distribution<double> normal;
  Matrix T(dim, points);
  for (Index j = 0; j < T.cols(); ++j)
    for (Index i = 0; i < T.rows(); ++i) T(i, j) = normal(rng);
  return T;
}

void BM_GammaUpper(benchmark::State& state) {
  const Matrix T = point_set(16, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gamma_q_upper(T, 2, Metric::Euclidean).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GammaUpper)->RangeMultiplier(4)->Range(16, 4096)->Complexity()->Unit(benchmark::kMicrosecond);

void BM_GammaExact(benchmark::State& state) {
  const Matrix T = point_set(4, 8);
  for (auto _ : state) benchmark::DoNotOptimize(gamma_q_exact(T, 1, Metric::Sup).value);
}
BENCHMARK(BM_GammaExact)->Unit(benchmark::kMicrosecond);

void BM_EmpSup(benchmark::State& state) {
  const Matrix T = point_set(16, 64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(emp_sup_process(T, Law::Exponential, 1000, 1, 1).mean);
  }
}
BENCHMARK(BM_EmpSup)->Unit(benchmark::kMillisecond);

void BM_BuildLevelNet(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(build_level_net(n, k).levels.size());
}
BENCHMARK(BM_BuildLevelNet)->Args({16, 7})->Args({64, 15})->Args({64, 63})->Unit(benchmark::kMillisecond);

void BM_DecomposeSparse(benchmark::State& state) {
  const auto h = build_level_net(64, 15);
  Rng rng = substream(6, 0);
  std::normal_distribution<double> normal;
  Vector x = Vector::Zero(64);
  for (int i = 0; i < 15; ++i) x(i * 4) = normal(rng);
  x /= x.norm();
  for (auto _ : state) benchmark::DoNotOptimize(decompose_sparse(x, h).error);
}
BENCHMARK(BM_DecomposeSparse)->Unit(benchmark::kMicrosecond);

}  // namespace
