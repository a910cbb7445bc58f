#include "impacteq/params.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace impacteq {

double ModelParams::sum_sq_endowments() const {
  double s = 0.0;
  for (double th : endowments) s += th * th;
  return s;
}

double ModelParams::k() const {
  const double floor = L * L / I;
  const double v = sum_sq_endowments() - floor;
  // |v| at rounding scale means equal holdings; snap so the degenerate
  // branch is taken exactly rather than shooting over a noise-width bracket
  return v > 64.0 * std::numeric_limits<double>::epsilon() * floor ? v : 0.0;
}

double ModelParams::endowment_sd() const {
  const double mean = L / I;
  double s = 0.0;
  for (double th : endowments) s += (th - mean) * (th - mean);
  return std::sqrt(s / I);
}

void ModelParams::validate() const {
  auto fail = [](const std::string& msg) { throw ParamError(msg); };
  auto finite = [&](double v, const char* name) {
    if (!std::isfinite(v)) fail(std::string(name) + " must be finite");
  };
  finite(a, "a");
  finite(delta, "delta");
  finite(mu_D, "mu_D");
  finite(sigma_D, "sigma_D");
  finite(D0, "D0");
  finite(mu_Y, "mu_Y");
  finite(sigma_Y, "sigma_Y");
  finite(rho, "rho");
  finite(L, "L");
  finite(T, "T");
  finite(alpha, "alpha");
  if (a <= 0.0) fail("risk aversion a must be positive");
  if (delta < 0.0) fail("time preference delta must be nonnegative");
  if (sigma_D < 0.0) fail("sigma_D must be nonnegative");
  if (sigma_Y < 0.0) fail("sigma_Y must be nonnegative");
  if (rho < -1.0 || rho > 1.0) fail("rho must lie in [-1, 1]");
  if (L <= 0.0) fail("share supply L must be positive");
  if (I < 2) fail("need at least two traders");
  if (T <= 0.0) fail("horizon T must be positive");
  if (alpha <= 0.0) fail("temporary impact alpha must be positive");
  if (static_cast<int>(endowments.size()) != I)
    fail("endowment vector must have one entry per trader");
  double sum = 0.0;
  for (double th : endowments) {
    if (!std::isfinite(th)) fail("endowments must be finite");
    sum += th;
  }
  if (std::abs(sum - L) > 1e-9 * L)
    fail("endowments must sum to the share supply L");
  if (sum_sq_endowments() - L * L / I < -1e-9 * L * L / I)
    fail("sum of squared endowments below the Cauchy-Schwarz floor");
}

std::vector<double> endowments_from_sd(int I, double L, double sd) {
  if (I < 2) throw ParamError("need at least two traders");
  if (L <= 0.0) throw ParamError("share supply L must be positive");
  if (sd < 0.0) throw ParamError("endowment SD must be nonnegative");
  const double mean = L / I;
  std::vector<double> theta(I, mean);
  if (sd == 0.0) return theta;
  if (I % 2 == 1) {
    const double c = std::sqrt(static_cast<double>(I) / (I - 1));
    for (int i = 0; i + 1 < I; ++i)
      theta[i] += (i % 2 == 0 ? sd * c : -sd * c);
  } else {
    const int half = I / 2;
    const double c = std::sqrt(static_cast<double>(I) / (2.0 * half));
    for (int i = 0; i < half; ++i) theta[i] += sd * c;
    for (int i = half; i < 2 * half; ++i) theta[i] -= sd * c;
  }
  return theta;
}

ModelParams params_with_sd(double sd, double alpha) {
  ModelParams p;
  p.alpha = alpha;
  p.endowments = endowments_from_sd(p.I, p.L, sd);
  return p;
}

}  // namespace impacteq
