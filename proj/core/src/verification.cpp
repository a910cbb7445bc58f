#include "impacteq/verification.hpp"

#include <cmath>
#include <random>

namespace impacteq {

namespace {

double uniform(std::mt19937_64& eng, double lo, double hi) {
  const double u = (eng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

ResidualReport clearing_identity(const NashEquilibrium& eq, double tolerance) {
  const ModelParams& p = eq.params;
  const SolutionGrids& g = eq.grids;
  ResidualReport rep;
  rep.check = "clearing_identity";
  rep.tolerance = tolerance;
  for (int j = 0; j < g.mesh.size(); ++j) {
    const double phi = p.I * std::log(g.F[j]) / p.a + p.I * g.Q[j] +
                       p.L * g.Q2[j] + 0.5 * g.Q22[j] * g.psi[j];
    if (std::abs(phi) > rep.max_residual) {
      rep.max_residual = std::abs(phi);
      rep.worst_node = j;
    }
  }
  rep.finish();
  return rep;
}

ResidualReport response_consistency(const NashEquilibrium& eq,
                                    double tolerance) {
  const ModelParams& p = eq.params;
  ResidualReport rep;
  rep.check = "response_consistency";
  rep.tolerance = tolerance;
  for (int node = 0; node < eq.grids.mesh.size(); ++node) {
    const ImpactCoefficients A = impact_coefficients(eq, node);
    const double fd_minus_s = -eq.price_shift[node];
    for (int i = 0; i < p.I; ++i) {
      const double ti = eq.holding(i, node);
      const double di = eq.order_rate(i, node);
      const double common = A.A0 * fd_minus_s + A.A2 * ti + A.A3 * di;
      for (int j = 0; j < p.I; ++j) {
        if (j == i) continue;
        const double rhs = common + A.A1 * eq.holding(j, node);
        const double res = std::abs(eq.order_rate(j, node) - rhs);
        if (res > rep.max_residual) {
          rep.max_residual = res;
          rep.worst_node = node;
        }
      }
    }
  }
  rep.finish();
  return rep;
}

ResidualReport deviation_response(const NashEquilibrium& eq,
                                  std::uint64_t seed, int samples,
                                  double tolerance) {
  const ModelParams& p = eq.params;
  const int steps = eq.grids.mesh.steps;
  std::mt19937_64 eng(seed);
  ResidualReport rep;
  rep.check = "deviation_response";
  rep.tolerance = tolerance;
  const double mean = p.L / p.I;
  for (int s = 0; s < samples; ++s) {
    const int node = 1 + static_cast<int>(eng() % (steps - 1));
    const int i = static_cast<int>(eng() % p.I);
    int j = static_cast<int>(eng() % p.I);
    if (j == i) j = (j + 1) % p.I;
    // arbitrary off-equilibrium state of the deviator and responder
    const double theta_i = uniform(eng, mean - 20.0, mean + 20.0);
    const double theta_j = uniform(eng, mean - 20.0, mean + 20.0);
    const double dtheta_i = uniform(eng, -10.0, 10.0);
    const double A1 = eq.gamma[node];
    const double direct = A1 * theta_j + A1 * (p.L - theta_i) / (1.0 - p.I) +
                          dtheta_i / (1.0 - p.I);
    const double dev = eq.order_rate(j, node) -
                       A1 * (eq.holding(j, node) - theta_j) +
                       (eq.order_rate(i, node) - dtheta_i) / (p.I - 1.0) -
                       A1 * (eq.holding(i, node) - theta_i) / (p.I - 1.0);
    const double res = std::abs(direct - dev);
    if (res > rep.max_residual) {
      rep.max_residual = res;
      rep.worst_node = node;
    }
  }
  rep.finish();
  return rep;
}

double hjb_drift_bracket(const NashEquilibrium& eq, int node,
                         const HjbState& s, const HjbControls& u) {
  const ModelParams& p = eq.params;
  const SolutionGrids& g = eq.grids;
  const double F = g.F[node];
  const double quad = s.D * s.theta + g.Q[node] + s.theta * g.Q2[node] +
                      0.5 * s.theta * s.theta * g.Q22[node] + s.Y;
  const double P = quad + s.M / F;
  const double lmth = p.L - s.theta * p.I;
  const double numer = -p.a * p.alpha * u.theta_prime * u.theta_prime -
                       p.a * u.c + p.a * quad + std::log(F) + 1.0;
  return std::exp(p.a * (P - u.c)) - numer / F +
         p.a * F * g.Q22[node] * g.Q22[node] * lmth * lmth /
             (p.alpha * p.I * p.I) -
         p.a * s.M / (F * F) +
         2.0 * p.a * u.theta_prime * g.Q22[node] * lmth / p.I;
}

HjbControls optimal_controls(const NashEquilibrium& eq, int node,
                             const HjbState& s) {
  const ModelParams& p = eq.params;
  const SolutionGrids& g = eq.grids;
  const double F = g.F[node];
  HjbControls u;
  u.theta_prime = eq.gamma[node] * (s.theta - p.L / p.I);
  u.c = s.D * s.theta + s.M / F + g.Q[node] + s.theta * g.Q2[node] +
        0.5 * s.theta * s.theta * g.Q22[node] + s.Y + std::log(F) / p.a;
  return u;
}

ResidualReport hjb_minimum(const NashEquilibrium& eq, std::uint64_t seed,
                           int samples, double tolerance) {
  const ModelParams& p = eq.params;
  const int steps = eq.grids.mesh.steps;
  std::mt19937_64 eng(seed);
  ResidualReport rep;
  rep.check = "hjb_minimum";
  rep.tolerance = tolerance;
  for (int s = 0; s < samples; ++s) {
    const int node = 1 + static_cast<int>(eng() % (steps - 1));
    HjbState st;
    st.D = uniform(eng, p.D0 - 2.0, p.D0 + 2.0);
    st.M = uniform(eng, -50.0, 50.0);
    st.theta = uniform(eng, p.L / p.I - 10.0, p.L / p.I + 10.0);
    st.Y = uniform(eng, -2.0, 2.0);
    const HjbControls u = optimal_controls(eq, node, st);
    const double res = std::abs(hjb_drift_bracket(eq, node, st, u));
    if (res > rep.max_residual) {
      rep.max_residual = res;
      rep.worst_node = node;
    }
  }
  rep.finish();
  return rep;
}

ResidualReport consumption_clearing(const NashEquilibrium& eq,
                                    const PathEnsemble& paths,
                                    double tolerance) {
  const ModelParams& p = eq.params;
  ResidualReport rep;
  rep.check = "consumption_clearing";
  rep.tolerance = tolerance;
  for (int path = 0; path < paths.n_paths; ++path) {
    for (int node = 0; node < paths.size(); ++node) {
      double total_c = 0.0, total_y = 0.0;
      for (int i = 0; i < paths.n_agents; ++i) {
        total_c += paths.consume(path, i, node);
        total_y += paths.endow(path, i, node);
      }
      const double target = p.L * paths.dividend(path, node) + total_y;
      const double res =
          std::abs(total_c - target) / std::max(1.0, std::abs(target));
      if (res > rep.max_residual) {
        rep.max_residual = res;
        rep.worst_node = node;
      }
    }
  }
  rep.finish();
  return rep;
}

VerificationBundle verify_equilibrium(const NashEquilibrium& eq,
                                      const PathOptions& paths) {
  VerificationBundle bundle;
  bundle.reports.push_back(clearing_identity(eq));
  bundle.reports.push_back(response_consistency(eq));
  bundle.reports.push_back(deviation_response(eq));
  bundle.reports.push_back(hjb_minimum(eq));
  bundle.reports.push_back(consumption_clearing(eq, simulate_paths(eq, paths)));
  return bundle;
}

}  // namespace impacteq
