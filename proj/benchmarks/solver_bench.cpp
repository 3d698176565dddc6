#include <benchmark/benchmark.h>

#include "cot/drm.hpp"
#include "cot/generate.hpp"
#include "cot/ibp.hpp"
#include "cot/lp_oracle.hpp"

namespace {

cot::ProblemInstance make_instance(std::size_t n, cot::Family family = cot::Family::kUniform1D) {
  cot::GenSpec spec;
  spec.family = family;
  spec.n = n;
  spec.seed = 7;
  return cot::generate(spec).instance;
}

void BM_DrmSolve(benchmark::State& state) {
  const auto instance = make_instance(static_cast<std::size_t>(state.range(0)));
  cot::DrmConfig config;
  config.epsilon = 1e-3;
  for (auto _ : state) {
    auto result = cot::drm_solve(instance, config);
    benchmark::DoNotOptimize(result.plan.gamma.values().data());
    state.counters["outer_iters"] = static_cast<double>(result.report.outer_iters);
  }
}
BENCHMARK(BM_DrmSolve)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_IbpSolve(benchmark::State& state) {
  const auto instance = make_instance(static_cast<std::size_t>(state.range(0)));
  cot::IbpConfig config;
  config.epsilon = 1e-3;
  for (auto _ : state) {
    auto result = cot::ibp_solve(instance, config);
    benchmark::DoNotOptimize(result.plan.gamma.values().data());
    state.counters["cycles"] = static_cast<double>(result.report.outer_iters);
  }
}
BENCHMARK(BM_IbpSolve)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_LpOracle(benchmark::State& state) {
  const auto instance = make_instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto solution = cot::lp_solve_exact(instance);
    benchmark::DoNotOptimize(solution.objective);
    state.counters["pivots"] = static_cast<double>(solution.pivots);
  }
}
BENCHMARK(BM_LpOracle)->Arg(32)->Arg(64)->Arg(100)->Unit(benchmark::kMillisecond);

// One row half sweep on the implicit rank-one capacity, no N x M storage.
void BM_DrmRowSweepRankOne(benchmark::State& state) {
  const auto instance = make_instance(static_cast<std::size_t>(state.range(0)), cot::Family::kMarginal1D);
  cot::DrmConfig config;
  config.epsilon = 1e-2;
  auto duals = cot::DualPotentials::initial(instance.n(), instance.m());
  for (auto _ : state) {
    auto stats = cot::half_sweep_rows(duals, instance, config);
    benchmark::DoNotOptimize(stats.newton_iters);
  }
}
BENCHMARK(BM_DrmRowSweepRankOne)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
