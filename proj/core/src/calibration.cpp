#include "impacteq/calibration.hpp"

#include <cmath>

namespace impacteq {

RateCalibration calibrate_rates(const ModelParams& base,
                                const RateTargets& t) {
  RateCalibration out;
  const double denom = t.lambda_target - base.a * base.sigma_Y * base.rho;
  if (!(denom > 0.0))
    throw ParamError("lambda target not attainable: a L sigma_D / (lambda - "
                     "a sigma_Y rho) must be positive");
  out.I_exact = base.a * base.L * base.sigma_D / denom;
  out.I = static_cast<int>(std::lround(out.I_exact));
  out.I_low = static_cast<int>(std::floor(out.I_exact));
  out.I_high = static_cast<int>(std::ceil(out.I_exact));
  // lround resolves near-half-integer targets arbitrarily; flag those so
  // callers can present both candidates.
  out.rounding_warning = std::abs(out.I_exact - out.I) > 0.49;
  if (out.I < 2) throw ParamError("calibrated investor count below 2");

  const double I = out.I;
  const double var = I * I * base.sigma_Y * base.sigma_Y +
                     2.0 * I * base.L * base.rho * base.sigma_D *
                         base.sigma_Y +
                     base.L * base.L * base.sigma_D * base.sigma_D;
  out.mu_Y = (t.r_radner_target - base.delta +
              base.a * base.a / (2.0 * I * I) * var) /
                 base.a -
             base.L * base.mu_D / I;
  return out;
}

double calibrate_alpha(const ImpactChain& c) {
  const double daily_vol = c.annual_return_vol / std::sqrt(c.trading_days);
  const double slope =
      (std::pow(c.Q3, c.beta_exponent) - std::pow(c.Q1, c.beta_exponent)) /
      (c.Q3 - c.Q1);
  return c.market_value * daily_vol * c.eta * slope * c.SO_over_ADV *
         (100.0 / c.shares) / c.trading_days;
}

}  // namespace impacteq
