// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <vector>

#include "polycalc/kernels.hpp"
#include "polycalc/random.hpp"

using namespace polycalc;
using kernels::Exec;

namespace {

CMatrix bench_matrix(int n) {
  Rng rng(20261016);
  CMatrix a = rng.gaussian(n, n);
  return 0.5 * a / opnorm(a);
}

std::vector<Complex> circle(int count, double radius) {
  std::vector<Complex> pts;
  for (int i = 0; i < count; ++i) pts.push_back(std::polar(radius, 2.0 * kPi * (i + 0.5) / count));
  return pts;
}

void BM_ResolventNorms(benchmark::State& state, Exec exec) {
  const int n = static_cast<int>(state.range(0));
  const kernels::SchurForm schur = kernels::SchurForm::of(bench_matrix(n));
  const std::vector<Complex> pts = circle(2048, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::resolvent_norms(schur, pts, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(pts.size()));
}

void BM_ResolventNormsReference(benchmark::State& state) {
  const CMatrix a = bench_matrix(static_cast<int>(state.range(0)));
  const std::vector<Complex> pts = circle(256, 1.0);  // compare items/s, the full SVD is slow
  for (auto _ : state) benchmark::DoNotOptimize(kernels::resolvent_norms_reference(a, pts));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(pts.size()));
}

void BM_WeightedResolventSum(benchmark::State& state, Exec exec) {
  const CMatrix a = bench_matrix(static_cast<int>(state.range(0)));
  const std::vector<Complex> nodes = circle(512, 1.2);
  std::vector<Complex> weights;
  for (Complex z : nodes) weights.push_back(z / static_cast<double>(nodes.size()));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::weighted_resolvent_sum(a, nodes, weights, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(nodes.size()));
}

}  // namespace

BENCHMARK_CAPTURE(BM_ResolventNorms, serial, Exec::Serial)->Arg(8)->Arg(32)->Arg(64);
BENCHMARK_CAPTURE(BM_ResolventNorms, parallel, Exec::Parallel)->Arg(8)->Arg(32)->Arg(64);
BENCHMARK(BM_ResolventNormsReference)->Arg(8)->Arg(32)->Arg(64);
BENCHMARK_CAPTURE(BM_WeightedResolventSum, serial, Exec::Serial)->Arg(8)->Arg(32);
BENCHMARK_CAPTURE(BM_WeightedResolventSum, parallel, Exec::Parallel)->Arg(8)->Arg(32);

int main(int argc, char** argv) {
  kernels::configure_threads_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
