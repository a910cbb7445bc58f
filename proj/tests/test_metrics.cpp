#include <doctest.h>

#include <cmath>
#include <vector>

#include "impacteq/metrics.hpp"
#include "reference_values.hpp"

using namespace impacteq;

namespace {

SolverOptions fast(int steps_per_year) {
  SolverOptions o;
  o.steps_per_year = steps_per_year;
  return o;
}

const NashEquilibrium& row1_eq() {
  static const NashEquilibrium eq =
      build_nash(params_with_sd(5.0, 0.002), fast(10000));
  return eq;
}

const GainTables& row1_tables() {
  static const GainTables tab = build_gain_tables(row1_eq().view());
  return tab;
}

// Independent cumulative integrator (composite Simpson with a quadratic
// start rule), fourth-order accurate at every node.
std::vector<double> cumsimpson(const std::vector<double>& y, double dt) {
  std::vector<double> out(y.size(), 0.0);
  REQUIRE(y.size() >= 3);
  out[1] = dt / 12.0 * (5.0 * y[0] + 8.0 * y[1] - y[2]);
  for (std::size_t i = 2; i < y.size(); ++i) {
    if (i % 2 == 0)
      out[i] = out[i - 2] + dt / 3.0 * (y[i - 2] + 4.0 * y[i - 1] + y[i]);
    else
      out[i] =
          out[i - 1] + dt / 12.0 * (-y[i - 2] + 8.0 * y[i - 1] + 5.0 * y[i]);
  }
  return out;
}

// The annuity factor must equal the discounted remaining-horizon integral of
// the short rate path: F(t) = e^{R(t)} ((W(T) - W(t)) + e^{-R(T)}).
double annuity_identity_gap(int steps_per_year) {
  const NashEquilibrium eq =
      build_nash(params_with_sd(5.0, 0.002), fast(steps_per_year));
  const double dt = eq.grids.mesh.dt();
  const std::vector<double> R = cumsimpson(eq.r, dt);
  std::vector<double> emR(R.size());
  for (std::size_t j = 0; j < R.size(); ++j) emR[j] = std::exp(-R[j]);
  const std::vector<double> W = cumsimpson(emR, dt);
  const double tailW = W.back();
  const double tailR = std::exp(-R.back());
  double worst = 0.0;
  for (std::size_t j = 0; j < R.size(); ++j) {
    const double oracle = std::exp(R[j]) * ((tailW - W[j]) + tailR);
    worst = std::max(worst, std::abs(oracle - eq.grids.F[j]));
  }
  return worst;
}

double direct_variance(const EquilibriumView& v, const GainTables& tab,
                       int node) {
  const double F = v.F[node];
  const double eR = std::exp(tab.R[node]);
  const double W = tab.W[node];
  const double dt = v.mesh.dt();
  double acc = 0.0;
  for (int s = 0; s <= node; ++s) {
    const double integ = F + eR * (W - tab.W[s]);
    const double sq = integ * integ;
    acc += (s == 0 || s == node) ? 0.5 * sq : sq;
  }
  acc *= dt;
  const double sd = v.params->sigma_D;
  return sd * sd / (v.S0 * v.S0) * acc;
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("gain tables start at zero and discount consistently") {
  const GainTables& tab = row1_tables();
  CHECK(tab.R.front() == 0.0);
  CHECK(tab.W.front() == 0.0);
  CHECK(tab.emR.front() == 1.0);
  for (std::size_t j = 0; j < tab.R.size(); j += 5000)
    CHECK(tab.emR[j] == doctest::Approx(std::exp(-tab.R[j])).epsilon(1e-14));
  // W accumulates a positive integrand
  for (std::size_t j = 1; j < tab.W.size(); ++j) CHECK(tab.W[j] > tab.W[j - 1]);
}

TEST_CASE("annuity factor agrees with an independent quadrature") {
  // both constructions are fourth-order accurate, so the residual sits at
  // rounding level already on the coarsest of these meshes
  CHECK(annuity_identity_gap(750) < 2e-11);
  CHECK(annuity_identity_gap(1500) < 2e-12);
  CHECK(annuity_identity_gap(3000) < 5e-13);
}

TEST_CASE("closed-form gain variance equals the direct quadrature") {
  const EquilibriumView v = row1_eq().view();
  const GainTables& tab = row1_tables();
  for (int node : {1, 97, 1234, 15000, 30000}) {
    const double expanded = gain_variance(v, tab, node);
    const double direct = direct_variance(v, tab, node);
    CHECK(expanded == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("one-year premium, variance, and Sharpe ratio match the reference") {
  const EquilibriumView v = row1_eq().view();
  const GainTables& tab = row1_tables();
  const int one = v.mesh.node_at(1.0);
  CHECK(equity_premium(v, tab, one) ==
        doctest::Approx(ref::kRow1.ep1).epsilon(1e-7));
  CHECK(gain_variance(v, tab, one) ==
        doctest::Approx(ref::kRow1.var1).epsilon(1e-7));
  CHECK(sharpe_quadrature(v, tab, one) ==
        doctest::Approx(ref::kRow1.sr1).epsilon(1e-7));
}

TEST_CASE("benchmark Sharpe ratios match the reference") {
  const ModelParams p = params_with_sd(5.0, 0.002);
  const Mesh mesh = make_mesh(p, fast(10000));
  const BenchmarkEquilibrium rad = build_benchmark(p, Benchmark::Radner, mesh);
  const BenchmarkEquilibrium par = build_benchmark(p, Benchmark::Pareto, mesh);
  const EquilibriumView rv = rad.view(), pv = par.view();
  const GainTables rt = build_gain_tables(rv), pt = build_gain_tables(pv);
  const int one = mesh.node_at(1.0);
  CHECK(equity_premium(rv, rt, one) ==
        doctest::Approx(ref::kEp1Radner).epsilon(1e-7));
  CHECK(gain_variance(rv, rt, one) ==
        doctest::Approx(ref::kVar1Radner).epsilon(1e-7));
  CHECK(sharpe_quadrature(rv, rt, one) ==
        doctest::Approx(ref::kSr1Radner).epsilon(1e-7));
  CHECK(equity_premium(pv, pt, one) ==
        doctest::Approx(ref::kEp1Pareto).epsilon(1e-7));
  CHECK(sharpe_quadrature(pv, pt, one) ==
        doctest::Approx(ref::kSr1Pareto).epsilon(1e-7));
}

TEST_CASE("short-horizon Sharpe ratios anchor to the market price of risk") {
  const EquilibriumView v = row1_eq().view();
  const GainTables& tab = row1_tables();
  const double lambda = market_price_of_risk(*v.params);
  const double anchored = instantaneous_sharpe(v, tab, 1e-3);
  CHECK(std::abs(anchored - lambda) <= 0.01 * lambda);
  const int node = v.mesh.node_at(1e-3);
  CHECK(anchored == doctest::Approx(sharpe_quadrature(v, tab, node) /
                                    std::sqrt(1e-3)));
}

TEST_CASE("Monte Carlo Sharpe agrees with quadrature and is reproducible") {
  const NashEquilibrium eq = build_nash(params_with_sd(5.0, 0.002), fast(2000));
  const EquilibriumView v = eq.view();
  const GainTables tab = build_gain_tables(v);
  McOptions opt;
  opt.n_paths = 4000;
  opt.seed = 20240905;
  opt.steps_per_year = 1000;
  const McEstimate est = sharpe_montecarlo(v, tab, 1.0, opt);
  const double quad = sharpe_quadrature(v, tab, v.mesh.node_at(1.0));
  CHECK(est.n_paths == 4000);
  CHECK(est.horizon == 1.0);
  CHECK(est.sharpe_se > 0.0);
  CHECK(est.ci_lo < est.sharpe);
  CHECK(est.sharpe < est.ci_hi);
  CHECK(std::abs(est.sharpe - quad) <= 4.0 * est.sharpe_se);

  const McEstimate rerun = sharpe_montecarlo(v, tab, 1.0, opt);
  CHECK(rerun.sharpe == est.sharpe);
  CHECK(rerun.var_gain == est.var_gain);

  opt.seed += 1;
  const McEstimate other = sharpe_montecarlo(v, tab, 1.0, opt);
  CHECK(other.sharpe != est.sharpe);
}

TEST_CASE("simulation meshes must nest inside the solver mesh") {
  const NashEquilibrium eq = build_nash(params_with_sd(5.0, 0.002), fast(2000));
  const EquilibriumView v = eq.view();
  const GainTables tab = build_gain_tables(v);
  McOptions opt;
  opt.n_paths = 10;
  opt.steps_per_year = 1500;  // 2000 solver steps/year are not a multiple
  CHECK_THROWS_AS(sharpe_montecarlo(v, tab, 1.0, opt), SolverError);
  opt.steps_per_year = 1000;
  // horizon lands on a solver node that is not a simulation node
  CHECK_THROWS_AS(sharpe_montecarlo(v, tab, 1.0 + 5e-4, opt), SolverError);
}

TEST_CASE("stream seeding separates paths deterministically") {
  CHECK(path_seed(12345, 0) == path_seed(12345, 0));
  CHECK(path_seed(12345, 0) != path_seed(12345, 1));
  CHECK(path_seed(12345, 0) != path_seed(12346, 0));
}

TEST_CASE("first-year sweep reports the reference gaps") {
  const ModelParams base = params_with_sd(5.0, 0.002);
  const Figure1Config cfgs[1] = {{5.0, 0.002}};
  const auto curves = figure1_sweep(base, cfgs, fast(10000), 50);
  REQUIRE(curves.size() == 1);
  const Figure1Curves& cur = curves[0];
  CHECK(cur.t.front() == 0.0);
  CHECK(cur.t.back() == doctest::Approx(1.0));
  REQUIRE(!cur.sr_t.empty());
  CHECK(cur.sr_t.front() > 0.0);
  CHECK(cur.sr_t.back() == doctest::Approx(1.0));
  // the competitive benchmark rate path is flat
  for (double r : cur.rate_bench)
    CHECK(r == doctest::Approx(cur.rate_bench.front()).epsilon(1e-14));
  CHECK(cur.max_rate_gap_pp ==
        doctest::Approx(ref::kRow1.max_rate_gap_pp).epsilon(1e-8));
  CHECK(cur.mean_rate_gap_pp ==
        doctest::Approx(ref::kRow1.mean_rate_gap_pp).epsilon(1e-6));
  CHECK(cur.max_vol_gap_pct ==
        doctest::Approx(ref::kRow1.max_vol_gap_pct).epsilon(1e-6));
  CHECK(std::abs(cur.sr_gap_at_horizon - ref::kRow1.sr_gap1) < 1e-7);
  CHECK(cur.sr_gap_at_horizon ==
        doctest::Approx(cur.sr_nash.back() - cur.sr_bench.back()));
}

TEST_CASE("joint path simulation is reproducible and self-consistent") {
  const NashEquilibrium eq = build_nash(params_with_sd(5.0, 0.002), fast(1000));
  PathOptions opt;
  opt.n_paths = 3;
  opt.seed = 777;
  opt.steps_per_year = 500;
  const PathEnsemble a = simulate_paths(eq, opt);
  const PathEnsemble b = simulate_paths(eq, opt);
  CHECK(a.stride == 2);
  CHECK(a.n_paths == 3);
  CHECK(a.n_agents == 15);
  CHECK(a.D == b.D);
  CHECK(a.M == b.M);
  CHECK(a.c == b.c);
  for (int path = 0; path < a.n_paths; ++path) {
    CHECK(a.dividend(path, 0) == eq.params.D0);
    CHECK(a.price(path, 0) == doctest::Approx(eq.S0));
    for (int i = 0; i < a.n_agents; ++i) {
      CHECK(a.endow(path, i, 0) == 0.0);
      CHECK(a.money(path, i, 0) == 0.0);
    }
    // prices follow the pricing rule along the simulated dividend
    for (int node : {1, a.mesh.steps / 2, a.mesh.steps}) {
      CHECK(a.price(path, node) ==
            doctest::Approx(eq.price(node * a.stride, a.dividend(path, node)))
                .epsilon(1e-14));
    }
  }
}

TEST_SUITE_END();
