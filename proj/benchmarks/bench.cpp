// Microbenchmarks for the hot paths: the shooting solve at several mesh
// resolutions, gain-table assembly, the Sharpe quadrature and Monte Carlo
// estimators, and the residual checks used in verification.

#include <benchmark/benchmark.h>

#include "impacteq/equilibrium.hpp"
#include "impacteq/metrics.hpp"
#include "impacteq/verification.hpp"

using namespace impacteq;

namespace {

SolverOptions spy(int steps_per_year) {
  SolverOptions o;
  o.steps_per_year = steps_per_year;
  return o;
}

const NashEquilibrium& baseline() {
  static const NashEquilibrium eq =
      build_nash(params_with_sd(5.0, 0.002), spy(10000));
  return eq;
}

const GainTables& baseline_tables() {
  static const GainTables tab = build_gain_tables(baseline().view());
  return tab;
}

void BM_Solve(benchmark::State& state) {
  const ModelParams p = params_with_sd(5.0, 0.002);
  const SolverOptions opt = spy(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    SolutionGrids grids = solve(p, opt);
    benchmark::DoNotOptimize(grids.F.back());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Solve)->Arg(1000)->Arg(10000)->Arg(100000)->Complexity();

void BM_BuildEquilibrium(benchmark::State& state) {
  const ModelParams p = params_with_sd(5.0, 0.002);
  const SolverOptions opt = spy(10000);
  for (auto _ : state) {
    NashEquilibrium eq = build_nash(p, opt);
    benchmark::DoNotOptimize(eq.S0);
  }
}
BENCHMARK(BM_BuildEquilibrium);

void BM_GainTables(benchmark::State& state) {
  const EquilibriumView v = baseline().view();
  for (auto _ : state) {
    GainTables tab = build_gain_tables(v);
    benchmark::DoNotOptimize(tab.W.back());
  }
}
BENCHMARK(BM_GainTables);

void BM_SharpeQuadrature(benchmark::State& state) {
  const EquilibriumView v = baseline().view();
  const GainTables& tab = baseline_tables();
  const int one = v.mesh.node_at(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sharpe_quadrature(v, tab, one));
  }
}
BENCHMARK(BM_SharpeQuadrature);

void BM_SharpeMonteCarlo(benchmark::State& state) {
  const EquilibriumView v = baseline().view();
  const GainTables& tab = baseline_tables();
  McOptions opt;
  opt.n_paths = static_cast<int>(state.range(0));
  opt.steps_per_year = 1000;
  for (auto _ : state) {
    const McEstimate est = sharpe_montecarlo(v, tab, 1.0, opt);
    benchmark::DoNotOptimize(est.sharpe);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SharpeMonteCarlo)->Arg(1000)->Arg(10000);

void BM_ClearingCheck(benchmark::State& state) {
  for (auto _ : state) {
    const ResidualReport rep = clearing_identity(baseline());
    benchmark::DoNotOptimize(rep.max_residual);
  }
}
BENCHMARK(BM_ClearingCheck);

void BM_PathSimulation(benchmark::State& state) {
  PathOptions opt;
  opt.n_paths = 8;
  opt.steps_per_year = 1000;
  for (auto _ : state) {
    const PathEnsemble paths = simulate_paths(baseline(), opt);
    benchmark::DoNotOptimize(paths.c.back());
  }
}
BENCHMARK(BM_PathSimulation);

}  // namespace

BENCHMARK_MAIN();
