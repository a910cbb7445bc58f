#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "impacteq/metrics.hpp"
#include "impacteq/params.hpp"
#include "impacteq/solver.hpp"

namespace impacteq {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One run description: sections [model], [nash], [numerics], [output] in a
// key = value file, or the same shape as a JSON object. Rates and
// volatilities are decimals, not percent. Unknown keys are rejected.
struct RunConfig {
  ModelParams model;  // alpha included; endowments resolved via params()
  double endowment_sd = 5.0;
  bool explicit_endowments = false;
  std::vector<double> endowments;

  int steps_per_year = 10000;
  double bisection_rel_tol = 1e-10;
  int mc_paths = 100000;
  std::uint64_t seed = 12345;
  int mc_steps_per_year = 1000;
  int metric_grid_points = 50;

  std::string out_directory = "out";
  std::vector<std::string> formats = {"csv", "json"};

  ModelParams params() const;
  SolverOptions solver_options() const;
  McOptions mc_options() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin);

// Full-precision canonical rendering; the hash of this string stamps every
// artifact so outputs are traceable to their inputs.
std::string canonical_config_string(const RunConfig& cfg);
std::uint64_t fnv1a64(std::string_view s);
std::string config_hash(const RunConfig& cfg);

}  // namespace impacteq
