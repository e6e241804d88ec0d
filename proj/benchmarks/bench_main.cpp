#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "design.hpp"
#include "hettrans/lambda_curve.hpp"
#include "hettrans/msd.hpp"
#include "hettrans/smoothers.hpp"

using namespace hettrans;

namespace {

void BM_CvCriterion(benchmark::State& st) {
  const auto data = testing_support::design_sample(static_cast<std::size_t>(st.range(0)), 3);
  std::vector<double> y(data.ys().begin(), data.ys().end());
  std::sort(y.begin(), y.end());
  const auto k = Kernel::epanechnikov();
  for (auto _ : st) benchmark::DoNotOptimize(cv_criterion(y, k, 0.2));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_CvCriterion)->Arg(250)->Arg(1000)->Arg(4000)->Complexity();

void BM_BuildLambda(benchmark::State& st) {
  const auto s = testing_support::design_state(static_cast<std::size_t>(st.range(0)), 3);
  const WeightFunction w({{0.0, 1.0}});
  LambdaOptions opt;
  opt.cover = Interval{0.2, 2.0};
  for (auto _ : st) benchmark::DoNotOptimize(build_lambda(s, w, opt).values().data());
}
BENCHMARK(BM_BuildLambda)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_AHat(benchmark::State& st) {
  const auto data = testing_support::design_sample(static_cast<std::size_t>(st.range(0)), 3);
  const auto cand = testing_support::analytic_candidate(0.25, 0.75);
  MsdConfig cfg;
  cfg.e_range = {0.0, 1.45};
  const auto basis = residual_basis(cand, data, cfg);
  for (auto _ : st) benchmark::DoNotOptimize(a_hat(residuals(basis, 1.3), cfg));
}
BENCHMARK(BM_AHat)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);

void BM_EstimateBMsd(benchmark::State& st) {
  const auto data = testing_support::design_sample(500, 3);
  const auto cand = testing_support::analytic_candidate(0.25, 0.75);
  MsdConfig cfg;
  cfg.b_range = {0.5, 2.5};
  cfg.e_range = {0.0, 1.45};
  for (auto _ : st) benchmark::DoNotOptimize(estimate_b_msd(cand, data, cfg).b_hat);
}
BENCHMARK(BM_EstimateBMsd)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
