#include "impacteq/solver.hpp"

#include <cmath>
#include <limits>

#include "impacteq/equilibrium.hpp"

namespace impacteq {

int Mesh::node_at(double time, double slack) const {
  const double x = time / dt();
  const int node = static_cast<int>(std::lround(x));
  if (node < 0 || node > steps || std::abs(x - node) > slack)
    throw SolverError("time does not lie on the mesh");
  return node;
}

Mesh make_mesh(const ModelParams& p, const SolverOptions& opt) {
  if (opt.steps_per_year < 1) throw SolverError("steps_per_year must be >= 1");
  const int steps =
      static_cast<int>(std::lround(opt.steps_per_year * p.T));
  Mesh m;
  m.T = p.T;
  m.steps = steps < 1 ? 1 : steps;
  return m;
}

namespace {

// Right-hand side of the reversed (h, f, g) system.
struct ReversedRhs {
  double q;          // a^2 sigma_D^2 / (2I)
  double c0;         // competitive-rate constant (rate at psi = L^2/I)
  double a_sd2;      // a sigma_D^2
  double inv_alpha2; // 2 / alpha

  explicit ReversedRhs(const ModelParams& p)
      : q(p.a * p.a * p.sigma_D * p.sigma_D / (2.0 * p.I)),
        c0(radner_rate(p)),
        a_sd2(p.a * p.sigma_D * p.sigma_D),
        inv_alpha2(2.0 / p.alpha) {}

  void operator()(const double y[3], double dy[3]) const {
    const double lin = q * y[0] - c0;
    dy[0] = inv_alpha2 * y[2] * y[0];
    dy[1] = 1.0 + y[1] * lin;
    dy[2] = a_sd2 * y[1] - inv_alpha2 * y[2] * y[2] + y[2] * lin;
  }
};

// One classical RK4 step of size dt.
inline void rk4_step(const ReversedRhs& rhs, double dt, double y[3]) {
  double k1[3], k2[3], k3[3], k4[3], tmp[3];
  rhs(y, k1);
  for (int i = 0; i < 3; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  rhs(tmp, k2);
  for (int i = 0; i < 3; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  rhs(tmp, k3);
  for (int i = 0; i < 3; ++i) tmp[i] = y[i] + dt * k3[i];
  rhs(tmp, k4);
  for (int i = 0; i < 3; ++i)
    y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace

ReversedTrajectory integrate_reversed(const ModelParams& p, const Mesh& mesh,
                                      double h0) {
  const ReversedRhs rhs(p);
  const double dt = mesh.dt();
  ReversedTrajectory tr;
  tr.h.resize(mesh.size());
  tr.f.resize(mesh.size());
  tr.g.resize(mesh.size());
  double y[3] = {h0, 1.0, 0.0};
  tr.h[0] = y[0];
  tr.f[0] = y[1];
  tr.g[0] = y[2];
  for (int j = 0; j < mesh.steps; ++j) {
    rk4_step(rhs, dt, y);
    tr.h[j + 1] = y[0];
    tr.f[j + 1] = y[1];
    tr.g[j + 1] = y[2];
    if (!(y[1] > 0.0))
      throw SolverError("annuity factor lost positivity while integrating");
  }
  return tr;
}

double reversed_terminal_h(const ModelParams& p, const Mesh& mesh, double h0) {
  const ReversedRhs rhs(p);
  const double dt = mesh.dt();
  double y[3] = {h0, 1.0, 0.0};
  for (int j = 0; j < mesh.steps; ++j) {
    rk4_step(rhs, dt, y);
    // Overshooting trajectories blow up through overflow: h, f and g all
    // diverge to +inf together (g cannot cross zero while f > 0, so there
    // is no finite-time failure from below). The shooting loop only needs
    // the sign of h(T) - k, so report an infinite terminal value.
    if (!(y[1] > 0.0) || !std::isfinite(y[0]))
      return std::numeric_limits<double>::infinity();
  }
  return y[0];
}

ShootResult shoot_h0(const ModelParams& p, const Mesh& mesh,
                     const SolverOptions& opt) {
  const double k = p.k();
  if (k <= 0.0) return {0.0, 0, 0.0};

  double lo = 0.0;        // h(T; 0) = 0 < k
  double hi = k;          // h(T; k) >= k since h is nondecreasing in s
  {
    const double hT = reversed_terminal_h(p, mesh, hi);
    if (hT < k) throw SolverError("shooting bracket failed: h(T; k) < k");
  }
  ShootResult res;
  double lo_resid = -k;  // h(T; 0) = 0
  for (int it = 1; it <= opt.shoot_max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double resid = reversed_terminal_h(p, mesh, mid) - k;
    res.h0 = mid;
    res.iterations = it;
    res.residual = resid;
    if (std::abs(resid) <= opt.shoot_rel_tol * k) return res;
    if (resid < 0.0) {
      lo = mid;
      lo_resid = resid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * k) {
      // Bracket collapsed to rounding width. Return the inside endpoint:
      // it integrated to a finite h(T), so the full-grid pass cannot run
      // into the overshoot blowup just above the root.
      res.h0 = lo;
      res.residual = lo_resid;
      return res;
    }
  }
  throw SolverError("shooting bisection did not converge");
}

SolutionGrids assemble_grids(const ModelParams& p, const Mesh& mesh,
                             const ShootResult& shot) {
  const ReversedTrajectory tr = integrate_reversed(p, mesh, shot.h0);
  const int n = mesh.steps;
  SolutionGrids out;
  out.mesh = mesh;
  out.k = p.k();
  out.shoot = shot;
  out.psi.resize(n + 1);
  out.F.resize(n + 1);
  out.Q22.resize(n + 1);
  const double floor_psi = p.L * p.L / p.I;
  for (int j = 0; j <= n; ++j) {
    out.psi[j] = tr.h[n - j] + floor_psi;
    out.F[j] = tr.f[n - j];
    out.Q22[j] = -tr.g[n - j] / tr.f[n - j];
  }

  // Backward RK4 for Q2 and Q from the terminal zeros. Both equations are
  // scalar linear ODEs given (F, Q22); half-node values come from linear
  // interpolation of the already-known grids.
  out.Q2.assign(n + 1, 0.0);
  out.Q.assign(n + 1, 0.0);
  const double dt = mesh.dt();
  const double imp = 1.0 / (p.alpha * p.I);  // impact scale 1/(alpha I)
  auto dQ2 = [&](double F, double Q22, double q2) {
    return p.a * p.rho * p.sigma_D * p.sigma_Y +
           2.0 * p.L * F * Q22 * Q22 * imp + q2 / F - p.mu_D;
  };
  auto dQ = [&](double F, double Q22, double q) {
    return -p.delta / p.a + (p.a * q + std::log(F) + 1.0) / (p.a * F) +
           p.a * p.sigma_Y * p.sigma_Y / 2.0 -
           p.L * p.L * F * Q22 * Q22 * imp / p.I - p.mu_Y;
  };
  for (int j = n; j > 0; --j) {
    const double Fr = out.F[j], Fl = out.F[j - 1], Fm = 0.5 * (Fr + Fl);
    const double Gr = out.Q22[j], Gl = out.Q22[j - 1], Gm = 0.5 * (Gr + Gl);
    const double q2 = out.Q2[j], q = out.Q[j];
    const double a2 = dQ2(Fr, Gr, q2), a1 = dQ(Fr, Gr, q);
    const double b2 = dQ2(Fm, Gm, q2 - 0.5 * dt * a2),
                 b1 = dQ(Fm, Gm, q - 0.5 * dt * a1);
    const double c2 = dQ2(Fm, Gm, q2 - 0.5 * dt * b2),
                 c1 = dQ(Fm, Gm, q - 0.5 * dt * b1);
    const double d2 = dQ2(Fl, Gl, q2 - dt * c2), d1 = dQ(Fl, Gl, q - dt * c1);
    out.Q2[j - 1] = q2 - dt / 6.0 * (a2 + 2.0 * b2 + 2.0 * c2 + d2);
    out.Q[j - 1] = q - dt / 6.0 * (a1 + 2.0 * b1 + 2.0 * c1 + d1);
  }
  return out;
}

SolutionGrids solve(const ModelParams& p, const SolverOptions& opt) {
  p.validate();
  const Mesh mesh = make_mesh(p, opt);
  const ShootResult shot = shoot_h0(p, mesh, opt);
  return assemble_grids(p, mesh, shot);
}

}  // namespace impacteq
