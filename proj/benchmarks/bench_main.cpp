#include <benchmark/benchmark.h>

#include "concomitant/clustering.hpp"
#include "concomitant/husler_reiss.hpp"
#include "concomitant/spectral.hpp"

using namespace concomitant;

namespace {

AngularSample hr_angles(int d, int n) {
  const auto gv = hr::gen_variogram(d, d / 4, 1);
  return extract_angles(hr::sample_hr(gv.gamma, n, 2), 0.1);
}

void BM_Fit(benchmark::State& state, Method method) {
  const auto angles = hr_angles(static_cast<int>(state.range(0)), 5000);
  FitOptions opt;
  opt.restarts = 10;
  for (auto _ : state) benchmark::DoNotOptimize(fit(angles, 2, method, opt).cost_value);
  state.counters["angles"] = static_cast<double>(angles.size());
}
BENCHMARK_CAPTURE(BM_Fit, kmeans, Method::kmeans)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Fit, kpc, Method::kpc)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PowerIteration(benchmark::State& state) {
  const auto angles = hr_angles(static_cast<int>(state.range(0)), 5000);
  const MomentMatrix m =
      MomentMatrix::from_outer_products(angles.rows().transpose() * angles.rows() / static_cast<double>(angles.size()));
  for (auto _ : state) benchmark::DoNotOptimize(principal_eigenpair(m).value);
}
BENCHMARK(BM_PowerIteration)->Arg(20)->Arg(100);

void BM_SampleHr(benchmark::State& state) {
  const auto gv = hr::gen_variogram(static_cast<int>(state.range(0)), 5, 3);
  for (auto _ : state) benchmark::DoNotOptimize(hr::sample_hr(gv.gamma, 1000, 4).rows().sum());
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SampleHr)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
