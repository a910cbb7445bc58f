#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace impacteq {

// Raised for invalid model input (bad ranges, inconsistent endowments).
class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Primitives of the CARA trading economy with price impact.
//
// Traders i = 1..I share one stock (supply L, dividend dD = mu_D dt + sigma_D dB)
// and receive unspanned income dY_i = mu_Y dt + sigma_Y (rho dB + sqrt(1-rho^2) dW_i).
// Aggregate equilibrium quantities depend on the endowment vector only through
// sum(theta^2); individual holdings paths depend on the full vector.
struct ModelParams {
  double a = 2.0;            // absolute risk aversion
  double delta = 0.02;       // time-preference rate
  double mu_D = 0.0201672;   // dividend drift
  double sigma_D = 0.0226743;
  double D0 = 1.0;           // initial dividend level
  double mu_Y = -0.0709146;  // income drift
  double sigma_Y = 0.1;
  double rho = 0.0;          // income-dividend correlation
  double L = 100.0;          // shares outstanding
  int I = 15;                // number of traders
  double T = 3.0;            // horizon in years
  double alpha = 0.002;      // temporary price-impact coefficient

  // Initial holdings, size I, must sum to L (relative slack 1e-9).
  std::vector<double> endowments;

  double sum_sq_endowments() const;

  // sum(theta^2) - L^2/I; nonnegative by Cauchy-Schwarz whenever the
  // endowments sum to L. Tiny negative rounding is clamped to zero.
  double k() const;

  // Population standard deviation of the endowment vector (1/I convention).
  double endowment_sd() const;

  // Throws ParamError when any field is out of range, the endowment vector
  // has the wrong size or sum, or k() would be materially negative.
  void validate() const;
};

// Deterministic endowment vector with mean exactly L/I and population SD
// exactly sd: theta_i = L/I + sd*z_i with a signed pattern z, sum(z) = 0,
// sum(z^2) = I. For odd I the pattern alternates +c, -c over the first I-1
// slots (c = sqrt(I/(I-1))) and sets the last slot to 0; for even I it is
// floor(I/2) entries of +c followed by floor(I/2) of -c, c = sqrt(I/(2*floor(I/2))).
std::vector<double> endowments_from_sd(int I, double L, double sd);

// Convenience: calibrated defaults plus the canonical endowment vector for sd.
ModelParams params_with_sd(double sd, double alpha);

}  // namespace impacteq
