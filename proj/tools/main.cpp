// Command-line frontend: solve the price-impact equilibrium, reproduce the
// summary table and figure data, run calibrations, and run the residual
// verification suite. Artifacts are CSV/JSON with a provenance header.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "impacteq/calibration.hpp"
#include "impacteq/config.hpp"
#include "impacteq/csv.hpp"
#include "impacteq/equilibrium.hpp"
#include "impacteq/metrics.hpp"
#include "impacteq/params.hpp"
#include "impacteq/solver.hpp"
#include "impacteq/verification.hpp"
#include "impacteq/version.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;
using namespace impacteq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitVerify = 3;

// Raised when an output-time invariant re-assertion fails.
struct VerifyFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::string config_path;
  std::string out_dir;
  int steps_per_year = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int mc_paths = 0;
  std::string format;
};

RunConfig resolve(const Overrides& o) {
  RunConfig cfg =
      o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (!o.out_dir.empty()) cfg.out_directory = o.out_dir;
  if (o.steps_per_year > 0) cfg.steps_per_year = o.steps_per_year;
  if (o.seed_set) cfg.seed = o.seed;
  if (o.mc_paths > 0) cfg.mc_paths = o.mc_paths;
  if (!o.format.empty()) cfg.formats = {o.format};
  return cfg;
}

bool wants(const RunConfig& cfg, const char* fmt) {
  return std::find(cfg.formats.begin(), cfg.formats.end(), fmt) !=
         cfg.formats.end();
}

fs::path ensure_out(const RunConfig& cfg) {
  fs::path out = cfg.out_directory;
  fs::create_directories(out);
  return out;
}

Json meta_json(const RunConfig& cfg) {
  return Json{{"tool_version", kVersion},
              {"config_hash", config_hash(cfg)},
              {"steps_per_year", cfg.steps_per_year},
              {"horizon_T", cfg.model.T},
              {"seed", cfg.seed}};
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

int cmd_solve(const RunConfig& cfg) {
  const ModelParams p = cfg.params();
  const NashEquilibrium eq = build_nash(p, cfg.solver_options());
  const fs::path out = ensure_out(cfg);
  const SolutionGrids& g = eq.grids;
  if (wants(cfg, "csv")) {
    CsvTable tab;
    tab.comments = metadata_comments(cfg);
    tab.columns = {"t", "psi", "F", "Q", "Q2", "Q22", "r", "gamma", "vol"};
    for (int j = 0; j < g.mesh.size(); ++j)
      tab.add_numeric_row({g.mesh.t(j), g.psi[j], g.F[j], g.Q[j], g.Q2[j],
                           g.Q22[j], eq.r[j], eq.gamma[j],
                           p.sigma_D * g.F[j]});
    write_csv(out / "grids.csv", tab);
  }
  if (wants(cfg, "json")) {
    const Mesh tiny{p.T, 1};
    Json j;
    j["meta"] = meta_json(cfg);
    j["h0_hat"] = g.shoot.h0;
    j["shooting"] = Json{{"iterations", g.shoot.iterations},
                         {"residual", g.shoot.residual},
                         {"k", g.k}};
    j["S0"] = eq.S0;
    j["r0"] = eq.r.front();
    j["psi_T"] = g.psi.back();
    j["lambda"] = market_price_of_risk(p);
    j["r_radner"] = radner_rate(p);
    j["r_pareto"] = pareto_rate(p);
    j["S0_radner"] = build_benchmark(p, Benchmark::Radner, tiny).S0;
    j["S0_pareto"] = build_benchmark(p, Benchmark::Pareto, tiny).S0;
    write_json(out / "summary.json", j);
  }
  std::printf("S0 %.6f  r(0) %.6f  psi(T) %.4f  (h0 %.9g, %d bisections)\n",
              eq.S0, eq.r.front(), g.psi.back(), g.shoot.h0,
              g.shoot.iterations);
  return kExitOk;
}

int cmd_table2(const RunConfig& cfg) {
  struct RowSpec {
    double sd, alpha;
  };
  const RowSpec specs[3] = {{5.0, 0.002}, {10.0, 0.002}, {5.0, 0.01}};
  const SolverOptions opts = cfg.solver_options();
  const ModelParams base = cfg.params();

  CsvTable tab;
  tab.comments = metadata_comments(cfg);
  tab.columns = {"sd",         "alpha",      "S0",    "S0_radner",
                 "S0_pareto",  "sum_sq_theta_T",      "SR1",
                 "SR1_radner", "SR1_pareto", "r0",    "r0_radner",
                 "r0_pareto"};
  std::string text =
      " SD  alpha   S0 (Radner) [Pareto]       sum theta_T^2   SR(1)    "
      "r(0) (Radner) [Pareto]\n";

  double s0_r = 0.0, s0_p = 0.0, sr1_r = 0.0, sr1_p = 0.0;
  double rate_r = 0.0, rate_p = 0.0;
  for (int row = 0; row < 3; ++row) {
    ModelParams p = base;
    p.alpha = specs[row].alpha;
    p.endowments = endowments_from_sd(p.I, p.L, specs[row].sd);
    const NashEquilibrium eq = build_nash(p, opts);
    const EquilibriumView nv = eq.view();
    const GainTables nt = build_gain_tables(nv);
    const int one = eq.grids.mesh.node_at(1.0);
    if (row == 0) {
      const BenchmarkEquilibrium rad =
          build_benchmark(p, Benchmark::Radner, eq.grids.mesh);
      const BenchmarkEquilibrium par =
          build_benchmark(p, Benchmark::Pareto, eq.grids.mesh);
      const EquilibriumView rv = rad.view(), pv = par.view();
      const GainTables rt = build_gain_tables(rv), pt = build_gain_tables(pv);
      s0_r = rad.S0;
      s0_p = par.S0;
      sr1_r = sharpe_quadrature(rv, rt, one);
      sr1_p = sharpe_quadrature(pv, pt, one);
      rate_r = rad.rate;
      rate_p = par.rate;
    }
    const double sr1 = sharpe_quadrature(nv, nt, one);
    tab.add_numeric_row({specs[row].sd, specs[row].alpha, eq.S0, s0_r, s0_p,
                         eq.grids.psi.back(), sr1, sr1_r, sr1_p, eq.r.front(),
                         rate_r, rate_p});
    char line[160];
    std::snprintf(line, sizeof line,
                  "%3.0f  %-6g  %.4f (%.4f) [%.4f]    %-14.1f  %.4f   "
                  "%.3f%% (%.3f%%) [%.3f%%]\n",
                  specs[row].sd, specs[row].alpha, eq.S0, s0_r, s0_p,
                  eq.grids.psi.back(), sr1, 100.0 * eq.r.front(),
                  100.0 * rate_r, 100.0 * rate_p);
    text += line;
  }

  const fs::path out = ensure_out(cfg);
  if (wants(cfg, "csv")) write_csv(out / "table2.csv", tab);
  {
    std::ofstream txt(out / "table2.txt", std::ios::binary);
    txt << text;
  }
  std::fputs(text.c_str(), stdout);
  return kExitOk;
}

int cmd_figure1(const RunConfig& cfg) {
  const ModelParams base = cfg.params();
  const SolverOptions opts = cfg.solver_options();
  const Figure1Config panels[3] = {
      {5.0, 0.002}, {5.0, 0.01}, {10.0, 0.002}};
  const std::vector<Figure1Curves> curves =
      figure1_sweep(base, panels, opts, cfg.metric_grid_points);
  const Figure1Curves& a002 = curves[0];  // sd 5, alpha 0.002
  const Figure1Curves& a01 = curves[1];   // sd 5, alpha 0.01
  const Figure1Curves& sd10 = curves[2];  // sd 10, alpha 0.002

  const BenchmarkEquilibrium pareto =
      build_benchmark(base, Benchmark::Pareto, make_mesh(base, opts));
  const double r_par = 100.0 * pareto.rate;

  // output-time re-assertion of the rate ordering, rowwise
  for (std::size_t j = 0; j < a002.t.size(); ++j) {
    const double r_rad = a002.rate_bench[j];
    for (const Figure1Curves* c : {&a002, &a01, &sd10}) {
      if (c->rate_nash[j] > r_rad + 1e-9 || r_rad > r_par + 1e-9)
        throw VerifyFailure("rate ordering violated at t = " +
                            std::to_string(c->t[j]));
    }
  }

  const fs::path out = ensure_out(cfg);
  const std::vector<std::string> meta = metadata_comments(cfg);
  auto panel = [&](std::vector<std::string> cols) {
    CsvTable tab;
    tab.comments = meta;
    tab.columns = std::move(cols);
    return tab;
  };

  CsvTable A = panel({"t", "r_nash_a002", "r_nash_a01", "r_radner",
                      "r_pareto"});
  CsvTable B = panel({"t", "r_nash_sd5", "r_nash_sd10", "r_radner",
                      "r_pareto"});
  CsvTable C = panel({"t", "vol_nash_a002", "vol_nash_a01", "vol_radner",
                      "vol_pareto"});
  CsvTable D = panel({"t", "vol_nash_sd5", "vol_nash_sd10", "vol_radner",
                      "vol_pareto"});
  for (std::size_t j = 0; j < a002.t.size(); ++j) {
    const double vol_par = 100.0 * base.sigma_D * pareto.F[j];
    A.add_numeric_row({a002.t[j], a002.rate_nash[j], a01.rate_nash[j],
                       a002.rate_bench[j], r_par});
    B.add_numeric_row({a002.t[j], a002.rate_nash[j], sd10.rate_nash[j],
                       a002.rate_bench[j], r_par});
    C.add_numeric_row({a002.t[j], a002.vol_nash[j], a01.vol_nash[j],
                       a002.vol_bench[j], vol_par});
    D.add_numeric_row({a002.t[j], a002.vol_nash[j], sd10.vol_nash[j],
                       a002.vol_bench[j], vol_par});
  }

  CsvTable E = panel({"t", "sr_diff_a002", "sr_diff_a01"});
  CsvTable F = panel({"t", "sr_diff_sd5", "sr_diff_sd10"});
  for (std::size_t j = 0; j < a002.sr_t.size(); ++j) {
    E.add_numeric_row({a002.sr_t[j], a002.sr_nash[j] - a002.sr_bench[j],
                       a01.sr_nash[j] - a01.sr_bench[j]});
    F.add_numeric_row({a002.sr_t[j], a002.sr_nash[j] - a002.sr_bench[j],
                       sd10.sr_nash[j] - sd10.sr_bench[j]});
  }

  write_csv(out / "figure1_panelA.csv", A);
  write_csv(out / "figure1_panelB.csv", B);
  write_csv(out / "figure1_panelC.csv", C);
  write_csv(out / "figure1_panelD.csv", D);
  write_csv(out / "figure1_panelE.csv", E);
  write_csv(out / "figure1_panelF.csv", F);

  std::printf("figure data: max rate gap %.4f pp, vol gap %.4f%%, "
              "SR gap at 1y %.3g (sd 5, alpha 0.002)\n",
              a002.max_rate_gap_pp, a002.max_vol_gap_pct,
              a002.sr_gap_at_horizon);
  return kExitOk;
}

int cmd_calibrate(const RunConfig& cfg, const RateTargets& targets,
                  const ImpactChain& chain) {
  const RateCalibration rc = calibrate_rates(cfg.model, targets);
  const double alpha_est = calibrate_alpha(chain);

  std::printf("investor count: %.6f rounds to I = %d\n", rc.I_exact, rc.I);
  if (rc.rounding_warning)
    std::printf("  warning: target between integers; candidates I = %d and "
                "I = %d\n",
                rc.I_low, rc.I_high);
  std::printf("income drift mu_Y = %.7f\n", rc.mu_Y);
  std::printf("temporary impact alpha = %.6f\n", alpha_est);

  Json j;
  j["meta"] = meta_json(cfg);
  j["targets"] = Json{{"lambda", targets.lambda_target},
                      {"r_radner", targets.r_radner_target}};
  j["I_exact"] = rc.I_exact;
  j["I"] = rc.I;
  j["rounding_warning"] = rc.rounding_warning;
  j["I_candidates"] = Json::array({rc.I_low, rc.I_high});
  j["mu_Y"] = rc.mu_Y;
  j["impact_chain"] = Json{{"market_value", chain.market_value},
                           {"annual_return_vol", chain.annual_return_vol},
                           {"eta", chain.eta},
                           {"beta_exponent", chain.beta_exponent},
                           {"Q1", chain.Q1},
                           {"Q3", chain.Q3},
                           {"SO_over_ADV", chain.SO_over_ADV},
                           {"shares", chain.shares},
                           {"trading_days", chain.trading_days}};
  j["alpha"] = alpha_est;
  write_json(ensure_out(cfg) / "calibration.json", j);
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
  const NashEquilibrium eq = build_nash(cfg.params(), cfg.solver_options());
  PathOptions po;
  po.n_paths = 8;
  po.seed = cfg.seed;
  po.steps_per_year = cfg.mc_steps_per_year;
  const VerificationBundle bundle = verify_equilibrium(eq, po);

  Json checks = Json::array();
  for (const ResidualReport& r : bundle.reports) {
    std::printf("%-24s %s  max residual %.3e (tolerance %.1e, node %d)\n",
                r.check.c_str(), r.pass ? "PASS" : "FAIL", r.max_residual,
                r.tolerance, r.worst_node);
    checks.push_back(Json{{"check", r.check},
                          {"max_residual", r.max_residual},
                          {"tolerance", r.tolerance},
                          {"pass", r.pass},
                          {"worst_node", r.worst_node}});
  }
  Json j;
  j["meta"] = meta_json(cfg);
  j["checks"] = checks;
  j["all_pass"] = bundle.all_pass();
  write_json(ensure_out(cfg) / "verify.json", j);

  if (!bundle.all_pass()) {
    std::fprintf(stderr,
                 "verification failed; residuals are discretization error, "
                 "try a finer mesh (--steps-per-year)\n");
    return kExitVerify;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"price-impact equilibrium solver and asset-pricing toolkit"};
  app.require_subcommand(1);

  Overrides o;
  app.add_option("--config", o.config_path,
                 "config file, key = value sections or JSON");
  app.add_option("--out", o.out_dir, "output directory (overrides config)");
  app.add_option("--steps-per-year", o.steps_per_year,
                 "solver mesh resolution (overrides config)");
  auto* seed_opt =
      app.add_option("--seed", o.seed, "simulation seed (overrides config)");
  app.add_option("--mc-paths", o.mc_paths,
                 "Monte Carlo path count (overrides config)");
  app.add_option("--format", o.format, "csv or json (overrides config)")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* c_solve = app.add_subcommand(
      "solve", "solve the equilibrium and write grids and a summary");
  CLI::App* c_table2 = app.add_subcommand(
      "table2", "summary comparison over the three canonical rows");
  CLI::App* c_figure1 = app.add_subcommand(
      "figure1", "first-year trajectory data for the six panels");
  CLI::App* c_calibrate =
      app.add_subcommand("calibrate", "back out I, mu_Y, and alpha");
  CLI::App* c_verify = app.add_subcommand(
      "verify", "run the residual verification suite");
  for (CLI::App* sub : {c_solve, c_table2, c_figure1, c_calibrate, c_verify})
    sub->fallthrough();

  RateTargets targets;
  ImpactChain chain;
  c_calibrate->add_option("--lambda", targets.lambda_target,
                          "market price of risk target");
  c_calibrate->add_option("--r-radner", targets.r_radner_target,
                          "competitive short-rate target (decimal)");
  c_calibrate->add_option("--market-value", chain.market_value,
                          "aggregate market value (model units)");
  c_calibrate->add_option("--annual-vol", chain.annual_return_vol,
                          "annual return volatility (decimal)");
  c_calibrate->add_option("--eta", chain.eta,
                          "impact power-law prefactor");
  c_calibrate->add_option("--beta", chain.beta_exponent,
                          "impact power-law exponent");
  c_calibrate->add_option("--q1", chain.Q1,
                          "lower-quartile participation rate");
  c_calibrate->add_option("--q3", chain.Q3,
                          "upper-quartile participation rate");
  c_calibrate->add_option("--so-adv", chain.SO_over_ADV,
                          "shares outstanding over average daily volume");
  c_calibrate->add_option("--days", chain.trading_days,
                          "trading days per year");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    o.seed_set = seed_opt->count() > 0;
    const RunConfig cfg = resolve(o);
    if (c_solve->parsed()) return cmd_solve(cfg);
    if (c_table2->parsed()) return cmd_table2(cfg);
    if (c_figure1->parsed()) return cmd_figure1(cfg);
    if (c_calibrate->parsed()) return cmd_calibrate(cfg, targets, chain);
    if (c_verify->parsed()) return cmd_verify(cfg);
    std::fprintf(stderr, "no command given\n");
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ParamError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const VerifyFailure& e) {
    std::fprintf(stderr, "verification failure: %s\n", e.what());
    return kExitVerify;
  } catch (const SolverError& e) {
    std::fprintf(stderr,
                 "solver error: %s\n  (a finer mesh via --steps-per-year "
                 "usually resolves this)\n",
                 e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
}
