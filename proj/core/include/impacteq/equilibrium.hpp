#pragma once

#include <span>
#include <vector>

#include "impacteq/params.hpp"
#include "impacteq/solver.hpp"

namespace impacteq {

// Short rates of the two frictionless benchmarks and the market price of
// risk shared by both. The price-impact rate path ends at the competitive
// (Radner) rate and lies below it whenever holdings are dispersed.
double radner_rate(const ModelParams& p);
double pareto_rate(const ModelParams& p);
double market_price_of_risk(const ModelParams& p);

// Read-only slice of an equilibrium that the return metrics consume: the
// annuity factor F, the price shift (price minus F times the dividend), and
// the short-rate path, all on one mesh.
struct EquilibriumView {
  const ModelParams* params = nullptr;
  Mesh mesh;
  std::span<const double> F;
  std::span<const double> price_shift;
  std::span<const double> r;
  double S0 = 0.0;

  double expected_dividend(double t) const {
    return params->D0 + params->mu_D * t;
  }
};

struct NashEquilibrium {
  ModelParams params;
  SolutionGrids grids;
  std::vector<double> r;            // short rate on mesh nodes
  std::vector<double> gamma;        // trading-rate coefficient F Q22 / alpha
  std::vector<double> decay;        // holdings deviation factor, 1 at t = 0
  std::vector<double> price_shift;  // F (L Q22 / I + Q2)
  double S0 = 0.0;

  double price(int node, double D) const;
  // Equilibrium holding of agent i: L/I plus the decayed initial deviation.
  double holding(int i, int node) const;
  double order_rate(int i, int node) const;
  EquilibriumView view() const;
};

NashEquilibrium build_nash(const ModelParams& p, SolutionGrids grids);
NashEquilibrium build_nash(const ModelParams& p, const SolverOptions& opt = {});

enum class Benchmark { Radner, Pareto };

// Constant-rate equilibrium evaluated in closed form on a mesh, so Nash and
// benchmark metrics integrate over identical nodes.
struct BenchmarkEquilibrium {
  ModelParams params;
  Mesh mesh;
  Benchmark kind = Benchmark::Radner;
  double rate = 0.0;
  std::vector<double> F;
  std::vector<double> price_shift;
  std::vector<double> r;  // constant path, kept so views share one layout
  double S0 = 0.0;

  double price(int node, double D) const;
  EquilibriumView view() const;
};

BenchmarkEquilibrium build_benchmark(const ModelParams& p, Benchmark kind,
                                     const Mesh& mesh);
BenchmarkEquilibrium build_benchmark(const ModelParams& p, Benchmark kind,
                                     const SolverOptions& opt = {});

// Coefficients of the best-response trading rule
//   theta_j' = A0 (F D - S) + A1 theta_j + A2 theta_i + A3 theta_i'
// where j indexes the responding agents and i the deviator. A1 equals the
// equilibrium trading-rate coefficient gamma, and A2 + A3 A1 = 0 at every
// node. The terminal node is a removable 0/0 point; it is filled with the
// limit obtained from the terminal slopes of Q2 and Q22.
struct ImpactCoefficients {
  double A0 = 0.0, A1 = 0.0, A2 = 0.0, A3 = 0.0;
};

ImpactCoefficients impact_coefficients(const NashEquilibrium& eq, int node);

// Price agent i expects to trade at when holding theta and ordering at rate
// theta_prime. Along equilibrium paths it collapses to the market price.
double perceived_price(const NashEquilibrium& eq, int node, double D,
                       double theta, double theta_prime);

// Optimal consumption at state (D, M, theta, Y).
double consumption(const NashEquilibrium& eq, int node, double D, double M,
                   double theta, double Y);

}  // namespace impacteq
