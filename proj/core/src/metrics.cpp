#include "impacteq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace impacteq {

namespace {

std::vector<double> cumtrapz(const std::vector<double>& y, double dt) {
  std::vector<double> out(y.size());
  out[0] = 0.0;
  for (std::size_t j = 1; j < y.size(); ++j)
    out[j] = out[j - 1] + 0.5 * dt * (y[j - 1] + y[j]);
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kPi = 3.14159265358979323846;

// Box-Muller on explicit 53-bit uniforms. std::normal_distribution is
// implementation-defined, which would break cross-platform reproducibility.
class NormalGen {
 public:
  explicit NormalGen(std::uint64_t seed) : eng_(seed) {}

  double operator()() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    const double u1 = ((eng_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = (eng_() >> 11) * 0x1.0p-53;        // [0, 1)
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * kPi * u2;
    spare_ = rad * std::sin(ang);
    have_ = true;
    return rad * std::cos(ang);
  }

 private:
  std::mt19937_64 eng_;
  bool have_ = false;
  double spare_ = 0.0;
};

// Simulation step as a whole number of solver steps.
int mesh_stride(const Mesh& mesh, int steps_per_year) {
  if (steps_per_year < 1)
    throw SolverError("simulation steps_per_year must be >= 1");
  const double ratio = mesh.steps / (mesh.T * steps_per_year);
  const int stride = static_cast<int>(std::lround(ratio));
  if (stride < 1 || std::abs(ratio - stride) > 1e-9 * std::max(1.0, ratio) ||
      mesh.steps % stride != 0)
    throw SolverError("simulation mesh must divide the solver mesh");
  return stride;
}

}  // namespace

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^
                    splitmix64(index + 0x9e3779b97f4a7c15ULL));
}

GainTables build_gain_tables(const EquilibriumView& eq) {
  GainTables tab;
  tab.mesh = eq.mesh;
  const int n = eq.mesh.size();
  const double dt = eq.mesh.dt();
  std::vector<double> rate(eq.r.begin(), eq.r.end());
  tab.R = cumtrapz(rate, dt);
  tab.emR.resize(n);
  for (int j = 0; j < n; ++j) tab.emR[j] = std::exp(-tab.R[j]);
  tab.W = cumtrapz(tab.emR, dt);
  std::vector<double> du(n), w2(n);
  for (int j = 0; j < n; ++j) {
    du[j] = eq.expected_dividend(eq.mesh.t(j)) * tab.emR[j];
    w2[j] = tab.W[j] * tab.W[j];
  }
  tab.U = cumtrapz(du, dt);
  tab.WI = cumtrapz(tab.W, dt);
  tab.W2 = cumtrapz(w2, dt);
  return tab;
}

double equity_premium(const EquilibriumView& eq, const GainTables& tab,
                      int node) {
  const double t = eq.mesh.t(node);
  const double eR = std::exp(tab.R[node]);
  return (eq.F[node] * eq.expected_dividend(t) + eq.price_shift[node] +
          eR * tab.U[node]) /
             eq.S0 -
         eR;
}

double gain_variance(const EquilibriumView& eq, const GainTables& tab,
                     int node) {
  // Trapezoid of (F(t) + e^R (W(t) - W(s)))^2 over s in [0, t], expanded so
  // the inner integral reduces to the precomputed tables.
  const double t = eq.mesh.t(node);
  const double F = eq.F[node];
  const double eR = std::exp(tab.R[node]);
  const double W = tab.W[node];
  const double WI = tab.WI[node];
  const double W2 = tab.W2[node];
  const double integral = F * F * t + 2.0 * F * eR * (W * t - WI) +
                          eR * eR * (W * W * t - 2.0 * W * WI + W2);
  const double sd = eq.params->sigma_D;
  return sd * sd / (eq.S0 * eq.S0) * integral;
}

double sharpe_quadrature(const EquilibriumView& eq, const GainTables& tab,
                         int node) {
  const double v = gain_variance(eq, tab, node);
  if (!(v > 0.0)) return 0.0;
  return equity_premium(eq, tab, node) / std::sqrt(v);
}

double instantaneous_sharpe(const EquilibriumView& eq, const GainTables& tab,
                            double t) {
  const int node = eq.mesh.node_at(t);
  return sharpe_quadrature(eq, tab, node) / std::sqrt(t);
}

McEstimate sharpe_montecarlo(const EquilibriumView& eq, const GainTables& tab,
                             double horizon, const McOptions& opt) {
  if (opt.n_paths < 2) throw SolverError("need at least two paths");
  const Mesh& mesh = eq.mesh;
  const int stride = mesh_stride(mesh, opt.steps_per_year);
  const int end_node = mesh.node_at(horizon);
  if (end_node % stride != 0)
    throw SolverError("horizon must lie on the simulation mesh");
  const int n_steps = end_node / stride;
  const double dt = mesh.dt() * stride;
  const ModelParams& p = *eq.params;
  std::vector<double> disc(n_steps + 1);
  for (int j = 0; j <= n_steps; ++j) disc[j] = tab.emR[j * stride];
  const double F_t = eq.F[end_node];
  const double shift_t = eq.price_shift[end_node];
  const double eR = std::exp(tab.R[end_node]);
  const double drift = p.mu_D * dt;
  const double diff = p.sigma_D * std::sqrt(dt);

  double mean = 0.0, m2 = 0.0;
  for (int path = 0; path < opt.n_paths; ++path) {
    NormalGen gen(path_seed(opt.seed, static_cast<std::uint64_t>(path)));
    double D = p.D0;
    double acc = 0.0;
    double prev = disc[0] * D;
    for (int j = 1; j <= n_steps; ++j) {
      D += drift + diff * gen();
      const double cur = disc[j] * D;
      acc += 0.5 * (prev + cur) * dt;
      prev = cur;
    }
    const double x = (F_t * D + shift_t + eR * acc) / eq.S0 - eR;
    const double delta = x - mean;
    mean += delta / (path + 1);
    m2 += delta * (x - mean);
  }

  McEstimate est;
  est.horizon = horizon;
  est.n_paths = opt.n_paths;
  est.mean_gain = mean;
  est.var_gain = m2 / (opt.n_paths - 1);
  est.sharpe = est.var_gain > 0.0 ? mean / std::sqrt(est.var_gain) : 0.0;
  est.sharpe_se =
      std::sqrt((1.0 + 0.5 * est.sharpe * est.sharpe) / opt.n_paths);
  est.ci_lo = est.sharpe - 1.96 * est.sharpe_se;
  est.ci_hi = est.sharpe + 1.96 * est.sharpe_se;
  return est;
}

std::vector<Figure1Curves> figure1_sweep(const ModelParams& base,
                                         std::span<const Figure1Config> configs,
                                         const SolverOptions& opt,
                                         int sr_points) {
  std::vector<Figure1Curves> out;
  out.reserve(configs.size());
  for (const Figure1Config& cfg : configs) {
    ModelParams p = base;
    p.alpha = cfg.alpha;
    p.endowments = endowments_from_sd(p.I, p.L, cfg.endowment_sd);
    const NashEquilibrium nash = build_nash(p, opt);
    const BenchmarkEquilibrium bench =
        build_benchmark(p, Benchmark::Radner, nash.grids.mesh);
    const EquilibriumView nv = nash.view();
    const EquilibriumView bv = bench.view();
    const GainTables nt = build_gain_tables(nv);
    const GainTables bt = build_gain_tables(bv);

    Figure1Curves cur;
    cur.config = cfg;
    const Mesh& mesh = nash.grids.mesh;
    const double dt = mesh.dt();
    const int end =
        std::min(mesh.steps, static_cast<int>(std::lround(1.0 / dt)));
    double gap_area = 0.0, prev_gap = 0.0;
    for (int j = 0; j <= end; ++j) {
      cur.t.push_back(mesh.t(j));
      cur.rate_nash.push_back(100.0 * nash.r[j]);
      cur.rate_bench.push_back(100.0 * bench.rate);
      cur.vol_nash.push_back(100.0 * p.sigma_D * nash.grids.F[j]);
      cur.vol_bench.push_back(100.0 * p.sigma_D * bench.F[j]);
      const double rate_gap = cur.rate_bench[j] - cur.rate_nash[j];
      const double vol_gap = cur.vol_nash[j] - cur.vol_bench[j];
      cur.max_rate_gap_pp = std::max(cur.max_rate_gap_pp, rate_gap);
      cur.max_vol_gap_pct = std::max(cur.max_vol_gap_pct, vol_gap);
      if (j > 0) gap_area += 0.5 * dt * (prev_gap + rate_gap);
      prev_gap = rate_gap;
    }
    cur.mean_rate_gap_pp = gap_area / mesh.t(end);

    int prev_node = 0;
    for (int i = 1; i <= sr_points; ++i) {
      const double target = static_cast<double>(i) / sr_points;
      int node = static_cast<int>(std::lround(target / dt));
      node = std::min(node, end);
      if (node <= prev_node) continue;
      prev_node = node;
      cur.sr_t.push_back(mesh.t(node));
      cur.sr_nash.push_back(sharpe_quadrature(nv, nt, node));
      cur.sr_bench.push_back(sharpe_quadrature(bv, bt, node));
    }
    cur.sr_gap_at_horizon = cur.sr_nash.back() - cur.sr_bench.back();
    out.push_back(std::move(cur));
  }
  return out;
}

PathEnsemble simulate_paths(const NashEquilibrium& eq, const PathOptions& opt) {
  const Mesh& solver_mesh = eq.grids.mesh;
  const int stride = mesh_stride(solver_mesh, opt.steps_per_year);
  PathEnsemble e;
  e.mesh.T = solver_mesh.T;
  e.mesh.steps = solver_mesh.steps / stride;
  e.stride = stride;
  e.seed = opt.seed;
  e.n_paths = opt.n_paths;
  e.n_agents = eq.params.I;
  const int n = e.size();
  const std::size_t market = static_cast<std::size_t>(opt.n_paths) * n;
  const std::size_t agents = market * e.n_agents;
  e.D.resize(market);
  e.S.resize(market);
  e.Y.assign(agents, 0.0);
  e.M.assign(agents, 0.0);
  e.c.resize(agents);

  const ModelParams& p = eq.params;
  const double dt = e.mesh.dt();
  const double d_drift = p.mu_D * dt;
  const double d_diff = p.sigma_D * std::sqrt(dt);
  const double y_drift = p.mu_Y * dt;
  const double y_diff = p.sigma_Y * std::sqrt(dt);
  const double rho_c = p.rho;
  const double rho_s = std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho));

  for (int path = 0; path < opt.n_paths; ++path) {
    NormalGen gen(path_seed(opt.seed, static_cast<std::uint64_t>(path)));
    const std::size_t pd = static_cast<std::size_t>(path) * n;
    e.D[pd] = p.D0;
    e.S[pd] = eq.price(0, p.D0);
    for (int j = 0; j < n; ++j) {
      const int sj = j * stride;
      const double D = e.D[pd + j];
      const double S = e.S[pd + j];
      // record consumption at node j, then advance every account
      const double xi = j + 1 < n ? gen() : 0.0;
      for (int i = 0; i < e.n_agents; ++i) {
        const std::size_t pa =
            (static_cast<std::size_t>(path) * e.n_agents + i) * n;
        const double Y = e.Y[pa + j];
        const double M = e.M[pa + j];
        const double theta = eq.holding(i, sj);
        const double cons = consumption(eq, sj, D, M, theta, Y);
        e.c[pa + j] = cons;
        if (j + 1 < n) {
          const double zeta = gen();
          e.Y[pa + j + 1] =
              Y + y_drift + y_diff * (rho_c * xi + rho_s * zeta);
          e.M[pa + j + 1] =
              M + dt * (eq.r[sj] * M + theta * D - S * eq.order_rate(i, sj) +
                        Y - cons);
        }
      }
      if (j + 1 < n) {
        e.D[pd + j + 1] = D + d_drift + d_diff * xi;
        e.S[pd + j + 1] = eq.price(sj + stride, e.D[pd + j + 1]);
      }
    }
  }
  return e;
}

}  // namespace impacteq
