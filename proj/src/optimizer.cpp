#include "mumimo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mumimo/parallel.hpp"
#include "mumimo/rng.hpp"

namespace mumimo {

namespace {

SystemConfig with_alpha_k(const SystemConfig& base, int alphaT, int K) {
  SystemConfig c = base;
  c.alpha = static_cast<double>(alphaT) / base.T;
  c.K = K;
  return c;
}

FadingProfile head_profile(const FadingProfile& f, int K) {
  FadingProfile sub;
  sub.d = f.d.head(K);
  if (!f.positions_m.empty())
    sub.positions_m.assign(f.positions_m.begin(), f.positions_m.begin() + K);
  return sub;
}

// Expands a power split over the strongest `sub` users to all K users.
PowerSplit embed_power(const PowerSplit& p, int K) {
  PowerSplit out;
  const int sub = static_cast<int>(p.gamma.size());
  out.gamma = VectorXd::Zero(K);
  out.gamma_prime = VectorXd::Zero(K);
  out.active.assign(K, false);
  for (int k = 0; k < sub; ++k) {
    out.gamma[k] = p.gamma[k];
    out.gamma_prime[k] = p.gamma_prime[k];
    out.active[k] = p.active[k];
  }
  return out;
}

std::vector<int> active_indices(const PowerSplit& p) {
  std::vector<int> idx;
  for (Eigen::Index k = 0; k < p.gamma.size(); ++k)
    if (p.active[k] && p.gamma_prime[k] > 1e-12) idx.push_back(static_cast<int>(k));
  return idx;
}

struct GridCell {
  int alphaT = 0;
  int K = 0;
  double scan_rate = -1.0;
  PowerSplit power;
  PilotKind kind = PilotKind::orthogonal;
};

// One scan evaluation with the common per-cell seed so designs sharing a
// cell (and pipelines sharing a grid) see identical couplings.
double scan_rate(const SystemConfig& cfg, const FadingProfile& fading,
                 const PowerSplit& power, long trials, std::uint64_t seed) {
  const EffectiveGains g = effective_gains(cfg, fading, power);
  const int n = std::min(cfg.K, cfg.train_symbols());
  return mc_throughput(cfg, g, n, trials, seed).rate_bits_per_symbol;
}

enum class Bound { upper, lower };

DesignPoint bound_pipeline(const SystemConfig& cfg, const FadingProfile& fading,
                           long trials, std::uint64_t seed,
                           const PipelineOptions& opts, Bound bound) {
  cfg.validate();
  fading.validate();
  std::vector<int> agrid = opts.alphaT_grid.empty()
                               ? make_alpha_grid(cfg.T, opts.alpha_grid_points)
                               : opts.alphaT_grid;
  std::vector<int> kgrid = opts.K_grid.empty() ? std::vector<int>{cfg.K}
                                               : opts.K_grid;
  for (int k : kgrid)
    if (k < 1 || k > cfg.K)
      throw std::invalid_argument("pipeline: K grid entry out of range");

  PowerSolveOptions solver = opts.solver;
  solver.throw_on_nonconvergence = false;  // search loop keeps best iterate

  std::vector<GridCell> cells;
  for (int aT : agrid)
    for (int K : kgrid) cells.push_back({aT, K});

  parallel_for(cells.size(), [&](std::size_t ci) {
    GridCell& cell = cells[ci];
    const SystemConfig c = with_alpha_k(cfg, cell.alphaT, cell.K);
    const FadingProfile sub = head_profile(fading, cell.K);
    const int aT = cell.alphaT;
    const int n_act = std::min(cell.K, aT);
    const std::uint64_t cell_seed =
        mix_seed(seed, static_cast<std::uint64_t>(cell.alphaT),
                 static_cast<std::uint64_t>(cell.K));
    PowerSolveOptions so = solver;
    so.seed = mix_seed(cell_seed, 0x50F7ULL);

    // Candidate power splits, all rated with the cell-common scan seed.
    std::vector<PowerSplit> cand;
    if (cell.K <= aT) {
      cand.push_back(solve_power_kleq(c, sub, so));
      cand.push_back(gamma_highsnr(c, cell.K));
      cell.kind =
          bound == Bound::upper ? PilotKind::orthogonal : PilotKind::lower_bound;
    } else if (bound == Bound::upper) {
      cand.push_back(solve_power_kgt(c, sub, so));
      // The restricted orthogonal design stays feasible for the relaxed
      // problem, which keeps this bound above the achievable pipeline.
      const SystemConfig cr = with_alpha_k(cfg, aT, aT);
      cand.push_back(embed_power(solve_power_kleq(cr, head_profile(fading, aT), so),
                                 cell.K));
      cand.push_back(gamma_highsnr(c, n_act));
      cell.kind = PilotKind::upper_bound;
    } else {
      const SystemConfig cr = with_alpha_k(cfg, aT, aT);
      cand.push_back(embed_power(solve_power_kleq(cr, head_profile(fading, aT), so),
                                 cell.K));
      cand.push_back(gamma_highsnr(c, n_act));
      cell.kind = PilotKind::lower_bound;
    }

    cell.scan_rate = -1.0;
    for (auto& p : cand) {
      const double r = scan_rate(c, sub, p, opts.scan_trials, cell_seed);
      if (r > cell.scan_rate) {
        cell.scan_rate = r;
        cell.power = std::move(p);
      }
    }
  });

  // Argmax with the smallest-alpha, then smallest-K tie break.
  const GridCell* best = &cells.front();
  for (const auto& cell : cells) {
    const double tie = 1e-12 * std::max(1.0, best->scan_rate);
    if (cell.scan_rate > best->scan_rate + tie) best = &cell;
  }

  const SystemConfig c = with_alpha_k(cfg, best->alphaT, best->K);
  const FadingProfile sub = head_profile(fading, best->K);
  DesignPoint dp;
  dp.alpha = c.alpha;
  dp.K_total = best->K;
  dp.power = best->power;
  dp.pilot_kind = best->kind;
  dp.active_set = active_indices(best->power);
  const EffectiveGains g = effective_gains(c, sub, best->power);
  dp.rate = mc_throughput(c, g, std::min(best->K, best->alphaT), trials,
                          mix_seed(seed, 0xF1AA1ULL));
  return dp;
}

}  // namespace

std::vector<int> select_users(const FadingProfile& fading, double alpha, int T,
                              int K) {
  fading.validate();
  if (K < 1 || K > fading.d.size())
    throw std::invalid_argument("select_users: K out of range");
  const int aT = static_cast<int>(std::lround(alpha * T));
  const int n = std::min(K, aT);
  std::vector<int> idx(static_cast<std::size_t>(std::max(0, n)));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  return idx;
}

double optimal_k_equation(double x, double alpha) {
  const double aa = alpha - alpha * alpha;
  const double u = x + alpha;
  const double v = x + 1.0 - alpha;
  return -x * x - x * std::sqrt(aa) * (std::sqrt(u / v) + std::sqrt(v / u)) +
         2.0 * std::sqrt(aa * u * v) + 2.0 * aa;
}

double optimal_k_root(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("optimal_k_root: alpha in (0,1)");
  double lo = 1e-9;
  double hi = 10.0 + 2.0 * (alpha - alpha * alpha);
  if (optimal_k_equation(lo, alpha) <= 0.0)
    throw std::runtime_error("optimal_k_root: left endpoint not positive");
  int guard = 0;
  while (optimal_k_equation(hi, alpha) > 0.0) {
    hi *= 2.0;
    if (++guard > 200)
      throw std::runtime_error("optimal_k_root: no sign change found");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (optimal_k_equation(mid, alpha) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

int optimal_k_uniform(double alpha, int T, double rho0, double d) {
  const double x = optimal_k_root(alpha);
  const int aT = static_cast<int>(std::lround(alpha * T));
  const double kc = x / (rho0 * d * d);
  if (kc <= aT) return aT;

  auto tau_at = [&](int K) {
    SystemConfig c;
    c.N = 1;
    c.K = K;
    c.T = T;
    c.alpha = alpha;
    c.P0 = rho0;
    c.N0 = 1.0;
    const double g = gamma_uniform_opt(c, d);
    const double gp = (1.0 - alpha * g) / (1.0 - alpha);
    return tau_effective(c, d, g, gp, K);
  };
  const int lo = std::max(aT, static_cast<int>(std::floor(kc)));
  const int hi = std::max(aT, static_cast<int>(std::ceil(kc)));
  if (lo == hi) return lo;
  return tau_at(hi) > tau_at(lo) ? hi : lo;
}

std::vector<int> make_alpha_grid(int T, int max_points) {
  std::vector<int> grid;
  const int pts = std::max(1, max_points);
  const int stride = std::max(1, T / (pts + 1));
  for (int j = stride; j <= T - 1 && static_cast<int>(grid.size()) < pts;
       j += stride)
    grid.push_back(j);
  if (grid.empty()) grid.push_back(std::max(1, T / 2));
  return grid;
}

DesignPoint upper_bound_pipeline(const SystemConfig& cfg,
                                 const FadingProfile& fading, long trials,
                                 std::uint64_t seed,
                                 const PipelineOptions& opts) {
  return bound_pipeline(cfg, fading, trials, seed, opts, Bound::upper);
}

DesignPoint lower_bound_pipeline(const SystemConfig& cfg,
                                 const FadingProfile& fading, long trials,
                                 std::uint64_t seed,
                                 const PipelineOptions& opts) {
  return bound_pipeline(cfg, fading, trials, seed, opts, Bound::lower);
}

DesignPoint optimize_uniform(const SystemConfig& cfg, double d, long trials,
                             std::uint64_t seed,
                             const UniformPipelineOptions& opts) {
  cfg.validate();
  if (!(d > 0.0)) throw std::invalid_argument("optimize_uniform: d > 0");
  const std::vector<int> agrid = opts.alphaT_grid.empty()
                                     ? make_alpha_grid(cfg.T, opts.alpha_grid_points)
                                     : opts.alphaT_grid;

  struct Cell {
    int alphaT = 0;
    int K = 0;
    double gamma = 0.0;
    double tau = 0.0;
    double scan = -1.0;
  };
  std::vector<Cell> cells(agrid.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    Cell& cell = cells[i];
    cell.alphaT = agrid[i];
    SystemConfig c = cfg;
    c.alpha = static_cast<double>(cell.alphaT) / cfg.T;
    cell.K = std::min(opts.K_cap,
                      optimal_k_uniform(c.alpha, c.T, c.rho0(), d));
    c.K = cell.K;
    cell.gamma = gamma_uniform_opt(c, d);
    const double gp = (1.0 - c.alpha * cell.gamma) / (1.0 - c.alpha);
    cell.tau = tau_effective(c, d, cell.gamma, gp, cell.K);
    const int n = std::min(cell.K, cell.alphaT);
    if (opts.use_asymptotic) {
      cell.scan = asymptotic_throughput(c, d, cell.gamma, gp, cell.K)
                      .rate_bits_per_symbol;
    } else {
      EffectiveGains g{VectorXd::Constant(n, cell.tau), 1.0};
      cell.scan = mc_throughput(c, g, n, opts.scan_trials,
                                mix_seed(seed, cell.alphaT))
                      .rate_bits_per_symbol;
    }
  });

  const Cell* best = &cells.front();
  for (const auto& cell : cells)
    if (cell.scan > best->scan + 1e-12 * std::max(1.0, best->scan)) best = &cell;

  SystemConfig c = cfg;
  c.alpha = static_cast<double>(best->alphaT) / cfg.T;
  c.K = best->K;
  const double gp = (1.0 - c.alpha * best->gamma) / (1.0 - c.alpha);
  DesignPoint dp;
  dp.alpha = c.alpha;
  dp.K_total = best->K;
  dp.pilot_kind = PilotKind::uniform;
  dp.power = PowerSplit::uniform(best->K, best->gamma, gp);
  dp.active_set.resize(best->K);
  for (int k = 0; k < best->K; ++k) dp.active_set[k] = k;
  const int n = std::min(best->K, best->alphaT);
  if (opts.use_asymptotic) {
    dp.rate = asymptotic_throughput(c, d, best->gamma, gp, best->K);
  } else {
    EffectiveGains g{VectorXd::Constant(n, best->tau), 1.0};
    dp.rate = mc_throughput(c, g, n, trials, mix_seed(seed, 0xF1AA1ULL));
  }
  return dp;
}

DesignPoint random_pilot_baseline(const SystemConfig& cfg,
                                  const FadingProfile& fading, long trials,
                                  std::uint64_t seed,
                                  const PipelineOptions& opts) {
  cfg.validate();
  fading.validate();
  const std::vector<int> agrid = opts.alphaT_grid.empty()
                                     ? make_alpha_grid(cfg.T, opts.alpha_grid_points)
                                     : opts.alphaT_grid;

  struct Cell {
    int alphaT = 0;
    double scan = -1.0;
  };
  std::vector<Cell> cells(agrid.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    cells[i].alphaT = agrid[i];
    SystemConfig c = cfg;
    c.alpha = static_cast<double>(agrid[i]) / cfg.T;
    PilotDesignSpec spec{PilotKind::random, c, fading,
                         PowerSplit::uniform(cfg.K, 1.0, 1.0)};
    const PilotMatrix pilot =
        pilot_random(spec, mix_seed(seed, 0xBADC0DEULL, agrid[i]));
    cells[i].scan = evaluate_design(c, fading, pilot, spec.power,
                                    opts.scan_trials,
                                    mix_seed(seed, agrid[i], cfg.K))
                        .rate_bits_per_symbol;
  });

  const Cell* best = &cells.front();
  for (const auto& cell : cells)
    if (cell.scan > best->scan + 1e-12 * std::max(1.0, best->scan)) best = &cell;

  SystemConfig c = cfg;
  c.alpha = static_cast<double>(best->alphaT) / cfg.T;
  PilotDesignSpec spec{PilotKind::random, c, fading,
                       PowerSplit::uniform(cfg.K, 1.0, 1.0)};
  const PilotMatrix pilot =
      pilot_random(spec, mix_seed(seed, 0xBADC0DEULL, best->alphaT));
  DesignPoint dp;
  dp.alpha = c.alpha;
  dp.K_total = cfg.K;
  dp.pilot_kind = PilotKind::random;
  dp.power = spec.power;
  dp.active_set.resize(cfg.K);
  for (int k = 0; k < cfg.K; ++k) dp.active_set[k] = k;
  dp.rate = evaluate_design(c, fading, pilot, spec.power, trials,
                            mix_seed(seed, 0xF1AA1ULL));
  return dp;
}

}  // namespace mumimo
