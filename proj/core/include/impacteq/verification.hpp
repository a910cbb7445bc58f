#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "impacteq/equilibrium.hpp"
#include "impacteq/metrics.hpp"

namespace impacteq {

struct ResidualReport {
  std::string check;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  int worst_node = -1;

  void finish() { pass = max_residual <= tolerance; }
};

// Goods-market clearing collapses to a deterministic identity:
// 0 = I log(F)/a + I Q + L Q2 + psi Q22 / 2 at every node. The residual is
// pure mesh-discretization error and shrinks at second order.
ResidualReport clearing_identity(const NashEquilibrium& eq,
                                 double tolerance = 1e-6);

// Along equilibrium paths, every responder's order rate must equal the
// perceived-response rule applied to the deviator's equilibrium behavior.
// Checked for all ordered pairs at every node; exact up to rounding.
ResidualReport response_consistency(const NashEquilibrium& eq,
                                    double tolerance = 1e-8);

// Off equilibrium, the deviation form of the response rule must reproduce
// the direct response rule for arbitrary holdings and order rates of the
// deviator. Probed at seeded random states.
ResidualReport deviation_response(const NashEquilibrium& eq,
                                  std::uint64_t seed = 20240801,
                                  int samples = 256, double tolerance = 1e-9);

struct HjbState {
  double D = 0.0, M = 0.0, theta = 0.0, Y = 0.0;
};

struct HjbControls {
  double c = 0.0, theta_prime = 0.0;
};

// Normalized drift of the candidate value process. Zero at the optimal
// feedback controls, strictly positive at any other control; quadratic in
// an order-rate perturbation with curvature a alpha / F.
double hjb_drift_bracket(const NashEquilibrium& eq, int node,
                         const HjbState& s, const HjbControls& u);

HjbControls optimal_controls(const NashEquilibrium& eq, int node,
                             const HjbState& s);

// Max |drift bracket| at the optimal controls over seeded random interior
// states; exact up to rounding.
ResidualReport hjb_minimum(const NashEquilibrium& eq,
                           std::uint64_t seed = 20240802, int samples = 64,
                           double tolerance = 1e-6);

// Pathwise goods clearing on a simulated ensemble: sum of consumption
// equals L D + sum of incomes, relative to the aggregate scale.
ResidualReport consumption_clearing(const NashEquilibrium& eq,
                                    const PathEnsemble& paths,
                                    double tolerance = 1e-6);

struct VerificationBundle {
  std::vector<ResidualReport> reports;

  bool all_pass() const {
    for (const ResidualReport& r : reports)
      if (!r.pass) return false;
    return true;
  }
};

VerificationBundle verify_equilibrium(const NashEquilibrium& eq,
                                      const PathOptions& paths = {});

}  // namespace impacteq
