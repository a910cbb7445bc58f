#include "impacteq/equilibrium.hpp"

#include <cmath>
#include <utility>

namespace impacteq {

double radner_rate(const ModelParams& p) {
  return p.delta + p.a / p.I * (p.L * p.mu_D + p.I * p.mu_Y) -
         p.a * p.a / (2.0 * p.I * p.I) *
             (p.I * p.I * p.sigma_Y * p.sigma_Y +
              2.0 * p.I * p.L * p.rho * p.sigma_D * p.sigma_Y +
              p.L * p.L * p.sigma_D * p.sigma_D);
}

double pareto_rate(const ModelParams& p) {
  const double hedged = p.L * p.sigma_D + p.I * p.sigma_Y * p.rho;
  return p.delta + p.a / p.I * (p.L * p.mu_D + p.I * p.mu_Y) -
         p.a * p.a / (2.0 * p.I * p.I) *
             (hedged * hedged +
              p.I * p.sigma_Y * p.sigma_Y * (1.0 - p.rho * p.rho));
}

double market_price_of_risk(const ModelParams& p) {
  return p.a / p.I * (p.L * p.sigma_D + p.I * p.sigma_Y * p.rho);
}

double NashEquilibrium::price(int node, double D) const {
  return grids.F[node] * D + price_shift[node];
}

double NashEquilibrium::holding(int i, int node) const {
  const double mean = params.L / params.I;
  return mean + (params.endowments[i] - mean) * decay[node];
}

double NashEquilibrium::order_rate(int i, int node) const {
  const double mean = params.L / params.I;
  return gamma[node] * (params.endowments[i] - mean) * decay[node];
}

EquilibriumView NashEquilibrium::view() const {
  EquilibriumView v;
  v.params = &params;
  v.mesh = grids.mesh;
  v.F = grids.F;
  v.price_shift = price_shift;
  v.r = r;
  v.S0 = S0;
  return v;
}

NashEquilibrium build_nash(const ModelParams& p, SolutionGrids grids) {
  NashEquilibrium eq;
  eq.params = p;
  eq.grids = std::move(grids);
  const int n = eq.grids.mesh.size();
  eq.r.resize(n);
  eq.gamma.resize(n);
  eq.decay.resize(n);
  eq.price_shift.resize(n);
  const double c0 = radner_rate(p);
  const double q = p.a * p.a * p.sigma_D * p.sigma_D / (2.0 * p.I);
  const double floor_psi = p.L * p.L / p.I;
  // Normalize by the dispersion the grid actually attains at t = 0, not by
  // the target k: the two differ by the shooting residual, and holdings
  // must start exactly at the configured endowments.
  const double h_init = eq.grids.psi.front() - floor_psi;
  for (int j = 0; j < n; ++j) {
    const double h = eq.grids.psi[j] - floor_psi;
    eq.r[j] = c0 - q * h;
    eq.gamma[j] = eq.grids.F[j] * eq.grids.Q22[j] / p.alpha;
    eq.decay[j] = h_init > 0.0 ? std::sqrt(std::max(0.0, h) / h_init) : 1.0;
    eq.price_shift[j] =
        eq.grids.F[j] * (p.L * eq.grids.Q22[j] / p.I + eq.grids.Q2[j]);
  }
  eq.S0 = eq.grids.F[0] * p.D0 + eq.price_shift[0];
  return eq;
}

NashEquilibrium build_nash(const ModelParams& p, const SolverOptions& opt) {
  return build_nash(p, solve(p, opt));
}

namespace {

// (1 - exp(-x)) / x, continuous through x = 0.
double phi1(double x) {
  if (std::abs(x) < 1e-12) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

// (1 - exp(-x) (1 + x)) / x^2, continuous through x = 0.
double phi2(double x) {
  if (std::abs(x) < 1e-3) {
    return 0.5 + x * (-1.0 / 3.0 + x * (1.0 / 8.0 +
                                        x * (-1.0 / 30.0 + x / 144.0)));
  }
  return (-std::expm1(-x) - x * std::exp(-x)) / (x * x);
}

}  // namespace

double BenchmarkEquilibrium::price(int node, double D) const {
  return F[node] * D + price_shift[node];
}

EquilibriumView BenchmarkEquilibrium::view() const {
  EquilibriumView v;
  v.params = &params;
  v.mesh = mesh;
  v.F = F;
  v.price_shift = price_shift;
  v.r = r;
  v.S0 = S0;
  return v;
}

BenchmarkEquilibrium build_benchmark(const ModelParams& p, Benchmark kind,
                                     const Mesh& mesh) {
  p.validate();
  BenchmarkEquilibrium eq;
  eq.params = p;
  eq.mesh = mesh;
  eq.kind = kind;
  eq.rate = kind == Benchmark::Radner ? radner_rate(p) : pareto_rate(p);
  const int n = mesh.size();
  eq.F.resize(n);
  eq.price_shift.resize(n);
  eq.r.assign(n, eq.rate);
  // Risk-adjusted dividend growth; the shift is its value in the annuity
  // numeraire: integral of (tau - s) discounted over the remaining horizon.
  const double mu_adj = p.mu_D - p.sigma_D * market_price_of_risk(p);
  for (int j = 0; j < n; ++j) {
    const double tau = mesh.T - mesh.t(j);
    const double x = eq.rate * tau;
    eq.F[j] = std::exp(-x) + tau * phi1(x);
    eq.price_shift[j] = mu_adj * (tau * tau * phi2(x) + tau * std::exp(-x));
  }
  eq.S0 = eq.F[0] * p.D0 + eq.price_shift[0];
  return eq;
}

BenchmarkEquilibrium build_benchmark(const ModelParams& p, Benchmark kind,
                                     const SolverOptions& opt) {
  return build_benchmark(p, kind, make_mesh(p, opt));
}

ImpactCoefficients impact_coefficients(const NashEquilibrium& eq, int node) {
  const ModelParams& p = eq.params;
  const SolutionGrids& g = eq.grids;
  const double F = g.F[node];
  double A0;
  double mix;  // I Q2 + 2 L Q22, or its terminal slope
  double q2, q22;
  if (node == g.mesh.steps) {
    // Q2 and Q22 vanish at T; replace them by their leading slopes in
    // (T - t), which cancel from every ratio below.
    q2 = p.mu_D - p.a * p.rho * p.sigma_D * p.sigma_Y;
    q22 = -p.a * p.sigma_D * p.sigma_D;
  } else {
    q2 = g.Q2[node];
    q22 = g.Q22[node];
  }
  mix = p.I * q2 + 2.0 * p.L * q22;
  A0 = p.I * p.L * q22 / (p.alpha * (p.I - 1) * mix);
  ImpactCoefficients c;
  c.A0 = A0;
  c.A1 = F * g.Q22[node] / p.alpha;  // exact cancellation: equals gamma
  c.A2 = node == g.mesh.steps
             ? 0.0
             : A0 * F * (p.I * q2 - (p.I - 2) * p.L * q22) / (p.I * p.L);
  c.A3 = A0 * p.alpha + 1.0 / (1.0 - p.I);
  return c;
}

double perceived_price(const NashEquilibrium& eq, int node, double D,
                       double theta, double theta_prime) {
  const ModelParams& p = eq.params;
  const SolutionGrids& g = eq.grids;
  return g.F[node] * D +
         g.F[node] * (2.0 * p.L * g.Q22[node] / p.I + g.Q2[node]) -
         g.F[node] * g.Q22[node] * theta + p.alpha * theta_prime;
}

double consumption(const NashEquilibrium& eq, int node, double D, double M,
                   double theta, double Y) {
  const ModelParams& p = eq.params;
  const SolutionGrids& g = eq.grids;
  return std::log(g.F[node]) / p.a + D * theta + M / g.F[node] + g.Q[node] +
         theta * g.Q2[node] + 0.5 * theta * theta * g.Q22[node] + Y;
}

}  // namespace impacteq
