// Micro-benchmarks over the fixed certification instance (V=2, 20 atoms,
// 12 voters per view). Run with --benchmark_filter=... to narrow.

#include <benchmark/benchmark.h>

#include "mvpb/bounds.hpp"
#include "mvpb/certify.hpp"
#include "mvpb/domain.hpp"
#include "mvpb/measures.hpp"
#include "mvpb/risks.hpp"

using namespace mvpb;

namespace {

const Instance& inst() {
  static Instance i = canonical_instance();
  return i;
}

BoundParams standard_params() {
  BoundParams p;
  p.m = 200;
  p.n = 200;
  p.delta = 0.05;
  p.c = 1.0;
  p.alpha = 0.5;
  p.kl_posterior = 0.1;
  p.kl_hyper = 0.05;
  return p;
}

void BM_ExactProfile(benchmark::State& state) {
  const Instance& I = inst();
  for (auto _ : state)
    benchmark::DoNotOptimize(exact_profile(I.ensemble, I.source));
}
BENCHMARK(BM_ExactProfile);

void BM_ExactOracle(benchmark::State& state) {
  const Instance& I = inst();
  for (auto _ : state)
    benchmark::DoNotOptimize(exact_oracle(I.ensemble, I.source, I.target));
}
BENCHMARK(BM_ExactOracle);

void BM_DrawSample(benchmark::State& state) {
  const Instance& I = inst();
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(draw_sample(I.source, 200, true, ++seed));
}
BENCHMARK(BM_DrawSample);

void BM_EmpiricalProfile(benchmark::State& state) {
  const Instance& I = inst();
  SampleSet S = draw_sample(I.source, 200, true, 1);
  SampleSet T = draw_sample(I.target, 200, false, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(empirical_profile(I.ensemble, S, T));
}
BENCHMARK(BM_EmpiricalProfile);

void BM_KlInverseUpper(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(kl_inverse_upper(0.1, 0.05));
}
BENCHMARK(BM_KlInverseUpper);

void BM_SeegerBound(benchmark::State& state) {
  BoundParams p = standard_params();
  for (auto _ : state) benchmark::DoNotOptimize(seeger_bound(0.1, p));
}
BENCHMARK(BM_SeegerBound);

void BM_DaCatoniBound(benchmark::State& state) {
  BoundParams p = standard_params();
  for (auto _ : state)
    benchmark::DoNotOptimize(da_catoni_bound(0.2, 0.1, 0.02, p));
}
BENCHMARK(BM_DaCatoniBound);

void BM_CertifyPerSample(benchmark::State& state) {
  const Instance& I = inst();
  BoundParams p = standard_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(certify_bound("mcallester", I.ensemble, I.source,
                                           I.target, p,
                                           static_cast<std::size_t>(state.range(0)),
                                           7, Reading::per_sample,
                                           PairSemantics::first_view, 1));
  }
}
BENCHMARK(BM_CertifyPerSample)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
