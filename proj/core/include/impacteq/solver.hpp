#pragma once

#include <stdexcept>
#include <vector>

#include "impacteq/params.hpp"

namespace impacteq {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Uniform time mesh on [0, T] with `steps` intervals (steps+1 nodes).
struct Mesh {
  double T = 3.0;
  int steps = 30000;

  double dt() const { return T / steps; }
  double t(int node) const { return T * (static_cast<double>(node) / steps); }
  int size() const { return steps + 1; }

  // Nearest node to `time`; throws SolverError when `time` is off the mesh
  // by more than `slack` intervals.
  int node_at(double time, double slack = 1e-6) const;
};

struct SolverOptions {
  int steps_per_year = 10000;
  double shoot_rel_tol = 1e-10;  // on |h(T) - k| relative to k
  int shoot_max_iter = 200;
};

Mesh make_mesh(const ModelParams& p, const SolverOptions& opt);

// Reversed-time trajectories on s = T - t:
//   h(s) = psi(T-s) - L^2/I,  f(s) = F(T-s),  g(s) = -F(T-s) Q22(T-s).
// The reversed system is an initial value problem at s = 0 (i.e. t = T):
//   h' = (2g/alpha) h          h(0) = h0
//   f' = 1 + f (q h - c0)      f(0) = 1
//   g' = a sigma_D^2 f - (2/alpha) g^2 + g (q h - c0)   g(0) = 0
// with q = a^2 sigma_D^2 / (2I) and c0 the competitive-rate constant.
struct ReversedTrajectory {
  std::vector<double> h, f, g;
};

ReversedTrajectory integrate_reversed(const ModelParams& p, const Mesh& mesh,
                                      double h0);

// Terminal value h(T) only; used by the shooting loop.
double reversed_terminal_h(const ModelParams& p, const Mesh& mesh, double h0);

struct ShootResult {
  double h0 = 0.0;       // psi(T) - L^2/I at the matched solution
  int iterations = 0;
  double residual = 0.0; // h(T; h0) - k
};

// Bisection on h0 in [0, k]; h(T; h0) is strictly increasing in h0 and
// h(T; h0) >= h0, so the bracket always straddles the root. k = 0 returns
// the degenerate h0 = 0 branch at once.
ShootResult shoot_h0(const ModelParams& p, const Mesh& mesh,
                     const SolverOptions& opt);

// Node-aligned solution of the coupled forward-backward system.
// psi, F, Q22 come from the reversed trajectories by index reflection;
// Q2 and Q are integrated backward from Q2(T) = Q(T) = 0 with RK4, linear
// interpolation supplying F and Q22 at half nodes.
struct SolutionGrids {
  Mesh mesh;
  std::vector<double> psi, F, Q, Q2, Q22;
  double k = 0.0;
  ShootResult shoot;
};

SolutionGrids assemble_grids(const ModelParams& p, const Mesh& mesh,
                             const ShootResult& shot);

// shoot_h0 + assemble_grids. Validates params first.
SolutionGrids solve(const ModelParams& p, const SolverOptions& opt = {});

}  // namespace impacteq
