#include <benchmark/benchmark.h>

#include "sparselab/design.hpp"
#include "sparselab/diagnostics.hpp"
#include "sparselab/instance.hpp"
#include "sparselab/lasso.hpp"
#include "sparselab/omp.hpp"
#include "sparselab/oracle.hpp"
#include "sparselab/sbl.hpp"

using namespace sparselab;

namespace {

DesignParams grid_point(Index m, Index p, Index k) {
  DesignParams dp;
  dp.m = m;
  dp.p = p;
  dp.k = k;
  dp.group_size = 3;
  dp.rho_in = 0.99;
  dp.rho_out_max = 0.3;
  dp.duplicate_tilt = 0.5;
  dp.seed = 1;
  return dp;
}

struct Problem {
  DesignMatrix design;
  Observation obs;
};

Problem make_problem(Index m, Index p, Index k) {
  DesignMatrix d = build_design(grid_point(m, p, k));
  const GroundTruth t = sample_ground_truth(d, 1.0, 20.0, 2);
  Observation o = observe(d, t, 0.15, 3);
  return {std::move(d), std::move(o)};
}

void BM_BuildDesign(benchmark::State& state) {
  const DesignParams dp = grid_point(state.range(0), 2 * state.range(0), 5);
  for (auto _ : state) benchmark::DoNotOptimize(build_design(dp));
}
BENCHMARK(BM_BuildDesign)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_WorstCaseIc(benchmark::State& state) {
  const Problem pr = make_problem(state.range(0), 2 * state.range(0), 5);
  for (auto _ : state) benchmark::DoNotOptimize(worst_case_irrepresentable(pr.design));
}
BENCHMARK(BM_WorstCaseIc)->Arg(100)->Arg(200);

void BM_LassoPath(benchmark::State& state) {
  const Problem pr = make_problem(state.range(0), 2 * state.range(0), 5);
  const LassoConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(lasso_path(pr.design, pr.obs, cfg));
}
BENCHMARK(BM_LassoPath)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Omp(benchmark::State& state) {
  const Problem pr = make_problem(state.range(0), 2 * state.range(0), 5);
  for (auto _ : state) benchmark::DoNotOptimize(fit_omp(pr.design, pr.obs, 5));
}
BENCHMARK(BM_Omp)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_Sbl(benchmark::State& state) {
  const Problem pr = make_problem(state.range(0), 2 * state.range(0), 5);
  SblHyper h;
  h.a = 2.0;
  h.noise_variance = 0.15 * 0.15;
  h.refine_support = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(fit_sbl(pr.design, pr.obs, h));
}
BENCHMARK(BM_Sbl)->Args({100, 0})->Args({100, 1})->Unit(benchmark::kMillisecond);

void BM_BestSubset(benchmark::State& state) {
  const Problem pr = make_problem(40, 60, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(best_subset(pr.design, pr.obs, 3, false,
                                         static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_BestSubset)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
