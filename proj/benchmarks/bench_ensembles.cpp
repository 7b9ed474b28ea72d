#include <benchmark/benchmark.h>

#include "chevetlab/bounds.hpp"
#include "chevetlab/ensembles.hpp"
#include "chevetlab/geometry.hpp"

namespace {

using namespace chevetlab;

void BM_Sample(benchmark::State& state) {
  const auto kind = static_cast<EnsembleKind>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  auto spec = EnsembleSpec::of(kind, d, d);
  spec.rotation_seed = 3;
  const Sampler sampler(spec);
  Rng rng = substream(1, 0);
  Matrix out(d, d);
  for (auto _ : state) {
    sampler.fill(rng, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetLabel(std::string(to_string(kind)));
  state.SetItemsProcessed(state.iterations() * d * d);
}
BENCHMARK(BM_Sample)
    ->ArgsProduct({{static_cast<int>(EnsembleKind::Gaussian), static_cast<int>(EnsembleKind::Exponential),
                    static_cast<int>(EnsembleKind::UniformBpBall),
                    static_cast<int>(EnsembleKind::RotatedExponential)},
                   {8, 64}});

void BM_OpNorm(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng = substream(2, 0);
  const Matrix g = sample(EnsembleSpec::of(EnsembleKind::Exponential, d, d), rng);
  const BallSpec pairs[][2] = {{BallSpec::l1(d), BallSpec::l1(d)},
                               {BallSpec::l2(d), BallSpec::l2(d)},
                               {BallSpec::linf(d), BallSpec::l1(d)},
                               {BallSpec::lp(d, 3.0), BallSpec::lp(d, 1.5)}};
  const auto& pair = pairs[state.range(1)];
  for (auto _ : state) benchmark::DoNotOptimize(op_norm(g, pair[0], pair[1]).value);
}
BENCHMARK(BM_OpNorm)->ArgsProduct({{8, 16}, {0, 1, 2, 3}})->Unit(benchmark::kMicrosecond);

void BM_ChevetRhs(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(chevet_rhs(BallSpec::l1(d), BallSpec::l2(d), 1000, 1, 1).total);
  }
}
BENCHMARK(BM_ChevetRhs)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
