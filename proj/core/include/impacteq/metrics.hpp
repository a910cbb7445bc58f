#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "impacteq/equilibrium.hpp"

namespace impacteq {

// Cumulative-trapezoid tables over the mesh. R integrates the short rate,
// W integrates exp(-R), U integrates the expected dividend times exp(-R).
// WI and W2 integrate W and W^2 so the gain variance is O(1) per node.
struct GainTables {
  Mesh mesh;
  std::vector<double> R;
  std::vector<double> emR;
  std::vector<double> W;
  std::vector<double> U;
  std::vector<double> WI;
  std::vector<double> W2;
};

GainTables build_gain_tables(const EquilibriumView& eq);

// Mean and variance of the excess gain on one share bought at S0, with
// dividends rolled up at the short rate, per unit of initial price.
double equity_premium(const EquilibriumView& eq, const GainTables& tab,
                      int node);
double gain_variance(const EquilibriumView& eq, const GainTables& tab,
                     int node);
double sharpe_quadrature(const EquilibriumView& eq, const GainTables& tab,
                         int node);

// Sharpe ratio per square-root year at horizon t; tends to the market price
// of risk as t goes to zero.
double instantaneous_sharpe(const EquilibriumView& eq, const GainTables& tab,
                            double t);

struct McOptions {
  int n_paths = 100000;
  std::uint64_t seed = 12345;
  // Simulation mesh; must divide the solver mesh so nodes line up exactly.
  int steps_per_year = 1000;
};

struct McEstimate {
  double horizon = 0.0;
  int n_paths = 0;
  double mean_gain = 0.0;
  double var_gain = 0.0;
  double sharpe = 0.0;
  double sharpe_se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// Simulates the excess gain distribution at the given horizon and estimates
// its Sharpe ratio with a large-sample standard error.
McEstimate sharpe_montecarlo(const EquilibriumView& eq, const GainTables& tab,
                             double horizon, const McOptions& opt = {});

struct Figure1Config {
  double endowment_sd = 0.0;
  double alpha = 0.0;
};

// One panel set: rate and volatility paths on mesh nodes in [0, 1] and
// Sharpe ratios on a coarser subgrid, price-impact against competitive.
struct Figure1Curves {
  Figure1Config config;
  std::vector<double> t;
  std::vector<double> rate_nash, rate_bench;  // percent per year
  std::vector<double> vol_nash, vol_bench;    // percent per year
  std::vector<double> sr_t;
  std::vector<double> sr_nash, sr_bench;
  double max_rate_gap_pp = 0.0;
  double mean_rate_gap_pp = 0.0;
  double max_vol_gap_pct = 0.0;
  double sr_gap_at_horizon = 0.0;
};

std::vector<Figure1Curves> figure1_sweep(const ModelParams& base,
                                         std::span<const Figure1Config> configs,
                                         const SolverOptions& opt = {},
                                         int sr_points = 50);

struct PathOptions {
  int n_paths = 8;
  std::uint64_t seed = 12345;
  int steps_per_year = 1000;  // must divide the solver mesh
};

// Joint simulation of the market state and every agent's wealth account and
// consumption along equilibrium strategies. Indexing is [path][node] for
// market arrays and [path][agent][node] for agent arrays, flattened.
struct PathEnsemble {
  Mesh mesh;       // simulation mesh
  int stride = 1;  // solver nodes per simulation step
  std::uint64_t seed = 0;
  int n_paths = 0;
  int n_agents = 0;
  std::vector<double> D;
  std::vector<double> S;
  std::vector<double> Y;
  std::vector<double> M;
  std::vector<double> c;

  int size() const { return mesh.size(); }
  double dividend(int path, int node) const { return D[path * size() + node]; }
  double price(int path, int node) const { return S[path * size() + node]; }
  double endow(int path, int agent, int node) const {
    return Y[(path * n_agents + agent) * size() + node];
  }
  double money(int path, int agent, int node) const {
    return M[(path * n_agents + agent) * size() + node];
  }
  double consume(int path, int agent, int node) const {
    return c[(path * n_agents + agent) * size() + node];
  }
};

PathEnsemble simulate_paths(const NashEquilibrium& eq,
                            const PathOptions& opt = {});

// Deterministic per-stream seeding used by the simulators.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace impacteq
