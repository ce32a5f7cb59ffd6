#include <benchmark/benchmark.h>

#include "distgen/bounds.hpp"
#include "distgen/dataset.hpp"
#include "distgen/features.hpp"
#include "distgen/learners.hpp"
#include "distgen/rate_distortion.hpp"
#include "distgen/rng.hpp"

using namespace distgen;

static void BM_BlahutArimoto(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RdInstance inst;
  inst.source.probs.assign(n, 1.0 / n);
  inst.distortion.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inst.distortion(i, j) = (i - j) * (i - j) / double(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(blahut_arimoto(inst, -2.0, 1e-8));
  }
}
BENCHMARK(BM_BlahutArimoto)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMillisecond);

static void BM_RffTransform(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  RffMap map(784, p, 0.01, 1);
  Rng rng(2);
  const Eigen::VectorXd x = rng.gaussian_vector(784);
  for (auto _ : state) {
    benchmark::DoNotOptimize(map.transform(x));
  }
}
BENCHMARK(BM_RffTransform)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);

static void BM_SgdEpochs(benchmark::State& state) {
  const auto data = synth_two_gaussians(50, 100, 1.5, 0.15, 3);
  SgdParams params;
  params.max_epochs = static_cast<int>(state.range(0));
  params.target_train_risk = 0.0;  // run every epoch
  for (auto _ : state) {
    benchmark::DoNotOptimize(sgd_train_svm(data, params));
  }
}
BENCHMARK(BM_SgdEpochs)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_EpsilonTerms(benchmark::State& state) {
  const auto p = SvmBoundParams::fit_defaults(100, 10, 0.2, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(epsilon_terms(p));
  }
}
BENCHMARK(BM_EpsilonTerms);

BENCHMARK_MAIN();
