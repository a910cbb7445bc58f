#pragma once

#include "impacteq/params.hpp"

namespace impacteq {

// Back out the investor count from the market price of risk, then the
// income drift from the competitive short rate, holding all other model
// coefficients fixed.
struct RateTargets {
  double lambda_target = 0.302324;
  double r_radner_target = 0.0813669;
};

struct RateCalibration {
  double I_exact = 0.0;  // before rounding
  int I = 0;
  int I_low = 0, I_high = 0;  // bracketing integers when rounding is doubtful
  bool rounding_warning = false;
  double mu_Y = 0.0;
};

RateCalibration calibrate_rates(const ModelParams& base, const RateTargets& t);

// Temporary price-impact per unit order rate, rescaled from per-order
// estimates for single names to the aggregate market: value times daily
// volatility times the interquartile slope of the impact power law, scaled
// by shares-outstanding turnover and spread over one trading day.
struct ImpactChain {
  double market_value = 3.5;
  double annual_return_vol = 0.2;
  double eta = 0.141;
  double beta_exponent = 0.6;
  double Q1 = 0.38;
  double Q3 = 1.36;
  double SO_over_ADV = 121.36;
  double shares = 100.0;
  double trading_days = 265.0;
};

double calibrate_alpha(const ImpactChain& c);

}  // namespace impacteq
