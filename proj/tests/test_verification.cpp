#include <doctest.h>

#include <cmath>

#include "impacteq/verification.hpp"
#include "reference_values.hpp"

using namespace impacteq;

namespace {

SolverOptions fast(int steps_per_year) {
  SolverOptions o;
  o.steps_per_year = steps_per_year;
  return o;
}

// Drift of the candidate value process rebuilt from finite differences of
// the value-function exponent, independently of the simplified closed form.
// Everything is expressed relative to the value at the probed state, so the
// ratio w equals 1 at the center and the huge exp(-aP) scale cancels.
double fd_bracket(const NashEquilibrium& eq, int node, const HjbState& s,
                  const HjbControls& u) {
  const ModelParams& p = eq.params;
  const SolutionGrids& g = eq.grids;
  const double dt = g.mesh.dt();
  auto exponent = [&](int n, double D, double M, double th, double Y) {
    return D * th + g.Q[n] + th * g.Q2[n] + 0.5 * th * th * g.Q22[n] + Y +
           M / g.F[n];
  };
  const double P0 = exponent(node, s.D, s.M, s.theta, s.Y);
  auto w = [&](int n, double D, double M, double th, double Y) {
    const double ddt = (n - node) * dt;
    return std::exp(-p.delta * ddt - p.a * (exponent(n, D, M, th, Y) - P0));
  };
  const double hD = 1e-5, hM = 1e-4, hth = 1e-5, hY = 1e-5;
  const double wDp = w(node, s.D + hD, s.M, s.theta, s.Y);
  const double wDm = w(node, s.D - hD, s.M, s.theta, s.Y);
  const double wMp = w(node, s.D, s.M + hM, s.theta, s.Y);
  const double wMm = w(node, s.D, s.M - hM, s.theta, s.Y);
  const double wTp = w(node, s.D, s.M, s.theta + hth, s.Y);
  const double wTm = w(node, s.D, s.M, s.theta - hth, s.Y);
  const double wYp = w(node, s.D, s.M, s.theta, s.Y + hY);
  const double wYm = w(node, s.D, s.M, s.theta, s.Y - hY);
  // fourth-order time stencil; the exponent moves fast in t when M is large
  const double w_t = (8.0 * (w(node + 1, s.D, s.M, s.theta, s.Y) -
                             w(node - 1, s.D, s.M, s.theta, s.Y)) -
                      (w(node + 2, s.D, s.M, s.theta, s.Y) -
                       w(node - 2, s.D, s.M, s.theta, s.Y))) /
                     (12.0 * dt);
  const double w_D = (wDp - wDm) / (2.0 * hD);
  const double w_M = (wMp - wMm) / (2.0 * hM);
  const double w_th = (wTp - wTm) / (2.0 * hth);
  const double w_Y = (wYp - wYm) / (2.0 * hY);
  const double w_DD = (wDp - 2.0 + wDm) / (hD * hD);
  const double w_YY = (wYp - 2.0 + wYm) / (hY * hY);
  const double w_DY = (w(node, s.D + hD, s.M, s.theta, s.Y + hY) -
                       w(node, s.D + hD, s.M, s.theta, s.Y - hY) -
                       w(node, s.D - hD, s.M, s.theta, s.Y + hY) +
                       w(node, s.D - hD, s.M, s.theta, s.Y - hY)) /
                      (4.0 * hD * hY);
  const double Si = perceived_price(eq, node, s.D, s.theta, u.theta_prime);
  const double drift_M = eq.r[node] * s.M + s.theta * s.D -
                         Si * u.theta_prime + s.Y - u.c;
  return std::exp(p.a * (P0 - u.c)) + w_t + w_M * drift_M + w_D * p.mu_D +
         w_th * u.theta_prime + w_Y * p.mu_Y +
         0.5 * p.sigma_D * p.sigma_D * w_DD +
         0.5 * p.sigma_Y * p.sigma_Y * w_YY +
         p.rho * p.sigma_D * p.sigma_Y * w_DY;
}

}  // namespace

TEST_SUITE_BEGIN("verification");

TEST_CASE("full verification bundle passes on a mid-resolution solve") {
  const NashEquilibrium eq = build_nash(params_with_sd(5.0, 0.002), fast(2000));
  PathOptions paths;
  paths.n_paths = 4;
  paths.seed = 99;
  paths.steps_per_year = 1000;
  const VerificationBundle bundle = verify_equilibrium(eq, paths);
  REQUIRE(bundle.reports.size() == 5);
  CHECK(bundle.all_pass());
  const char* names[] = {"clearing_identity", "response_consistency",
                         "deviation_response", "hjb_minimum",
                         "consumption_clearing"};
  for (std::size_t i = 0; i < bundle.reports.size(); ++i) {
    const ResidualReport& rep = bundle.reports[i];
    CHECK(rep.check == names[i]);
    CHECK(rep.pass);
    CHECK(rep.tolerance > 0.0);
    CHECK(rep.max_residual >= 0.0);
    CHECK(rep.max_residual <= rep.tolerance);
    CHECK(rep.worst_node >= 0);
  }
}

TEST_CASE("clearing residual shrinks under mesh refinement") {
  const ModelParams p = params_with_sd(5.0, 0.002);
  const ResidualReport coarse = clearing_identity(build_nash(p, fast(1000)));
  const ResidualReport fine = clearing_identity(build_nash(p, fast(2000)));
  CHECK(coarse.pass);
  CHECK(fine.pass);
  CHECK(fine.max_residual < coarse.max_residual / 3.0);
}

TEST_CASE("response rules hold to rounding on and off equilibrium") {
  const NashEquilibrium eq = build_nash(params_with_sd(5.0, 0.002), fast(1000));
  const ResidualReport on = response_consistency(eq);
  CHECK(on.pass);
  CHECK(on.max_residual < 1e-9);
  const ResidualReport off = deviation_response(eq);
  CHECK(off.pass);
  CHECK(off.max_residual < 1e-9);
}

TEST_CASE("drift bracket vanishes at the optimum and rises elsewhere") {
  const NashEquilibrium eq = build_nash(params_with_sd(5.0, 0.002), fast(1000));
  const ModelParams& p = eq.params;
  const double mean = p.L / p.I;
  const HjbState states[] = {{p.D0, 0.0, mean, 0.0},
                             {p.D0 + 0.8, 12.0, mean + 4.0, 0.6},
                             {p.D0 - 0.5, -7.0, mean - 2.5, -0.4}};
  for (int node : {1, 700, 2400, 2999}) {
    for (const HjbState& s : states) {
      const HjbControls u = optimal_controls(eq, node, s);
      const double at_opt = hjb_drift_bracket(eq, node, s, u);
      CHECK(std::abs(at_opt) < 1e-9);
      HjbControls worse = u;
      worse.theta_prime += 0.5;
      CHECK(hjb_drift_bracket(eq, node, s, worse) > 1e-8);
      worse = u;
      worse.c -= 0.3;
      CHECK(hjb_drift_bracket(eq, node, s, worse) > 1e-8);
      worse = u;
      worse.theta_prime -= 1.2;
      worse.c += 0.8;
      CHECK(hjb_drift_bracket(eq, node, s, worse) > 1e-8);
    }
  }
  const ResidualReport rep = hjb_minimum(eq);
  CHECK(rep.pass);
  CHECK(rep.max_residual < 1e-8);
}

TEST_CASE("order-rate deviations cost exactly the quadratic penalty") {
  const NashEquilibrium eq = build_nash(params_with_sd(5.0, 0.002), fast(1000));
  const ModelParams& p = eq.params;
  const HjbState s = {p.D0 + 0.3, -4.0, p.L / p.I + 2.0, 0.25};
  for (int node : {10, 1500, 2995}) {
    const HjbControls u = optimal_controls(eq, node, s);
    const double base = hjb_drift_bracket(eq, node, s, u);
    const double F = eq.grids.F[node];
    for (double eps : {-2.0, -0.1, 0.4, 3.0}) {
      HjbControls bent = u;
      bent.theta_prime += eps;
      const double lift = hjb_drift_bracket(eq, node, s, bent) - base;
      const double law = p.a * p.alpha * eps * eps / F;
      CHECK(std::abs(lift - law) < 1e-10 * (1.0 + std::abs(law)));
    }
  }
}

TEST_CASE("consumption deviations cost exactly the exponential penalty") {
  const NashEquilibrium eq = build_nash(params_with_sd(5.0, 0.002), fast(1000));
  const ModelParams& p = eq.params;
  const HjbState s = {p.D0 - 0.2, 6.0, p.L / p.I - 1.0, -0.15};
  for (int node : {10, 1500, 2995}) {
    const HjbControls u = optimal_controls(eq, node, s);
    const double base = hjb_drift_bracket(eq, node, s, u);
    const double F = eq.grids.F[node];
    for (double eps : {-1.0, -0.05, 0.2, 1.5}) {
      HjbControls bent = u;
      bent.c += eps;
      const double lift = hjb_drift_bracket(eq, node, s, bent) - base;
      const double law = (std::exp(-p.a * eps) - 1.0 + p.a * eps) / F;
      CHECK(std::abs(lift - law) < 1e-10 * (1.0 + std::abs(law)));
    }
  }
}

TEST_CASE("generator finite differences reproduce the drift bracket") {
  const NashEquilibrium eq = build_nash(params_with_sd(5.0, 0.002), fast(4000));
  const ModelParams& p = eq.params;
  const double mean = p.L / p.I;
  const HjbState states[] = {{p.D0, 0.0, mean, 0.0},
                             {p.D0 + 0.8, 12.0, mean + 4.0, 0.6},
                             {p.D0 - 0.5, -7.0, mean - 2.5, -0.4}};
  for (int node : {123, 2000, 9000, 11997}) {
    for (const HjbState& s : states) {
      const HjbControls u = optimal_controls(eq, node, s);
      HjbControls bent = u;
      bent.theta_prime += 0.7;
      bent.c -= 0.4;
      for (const HjbControls& ctrl : {u, bent}) {
        const double analytic = hjb_drift_bracket(eq, node, s, ctrl);
        const double fd = fd_bracket(eq, node, s, ctrl);
        CHECK(std::abs(fd - analytic) <= 1e-5 + 1e-3 * std::abs(analytic));
      }
    }
  }
}

TEST_CASE("pathwise consumption matches aggregate resources") {
  const NashEquilibrium eq = build_nash(params_with_sd(5.0, 0.002), fast(1000));
  PathOptions opt;
  opt.n_paths = 6;
  opt.seed = 2025;
  opt.steps_per_year = 500;
  const PathEnsemble paths = simulate_paths(eq, opt);
  const ResidualReport rep = consumption_clearing(eq, paths);
  CHECK(rep.pass);
  CHECK(rep.max_residual < 1e-8);
}

TEST_SUITE_END();
