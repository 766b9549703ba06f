#include "mumimo/power_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mumimo/majorization.hpp"
#include "mumimo/rng.hpp"

namespace mumimo {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Per-user curve constants: gain v_k(g) = gp(g) q_k c_k g / (1 + c_k g) and
// noise term q_k gp(g) / (1 + c_k g), with gp(g) = (1 - alpha g)/(1 - alpha).
struct UserCurves {
  double alpha = 0.0;
  double N0 = 0.0;
  VectorXd q;  // P0 d_k^2
  VectorXd c;  // alpha rho0 d_k^2 T

  static UserCurves make(const SystemConfig& cfg, const VectorXd& d) {
    UserCurves u;
    u.alpha = cfg.alpha;
    u.N0 = cfg.N0;
    u.q = cfg.P0 * d.cwiseProduct(d);
    u.c = cfg.alpha * cfg.rho0() * cfg.T * d.cwiseProduct(d);
    return u;
  }

  double gp(double g) const { return (1.0 - alpha * g) / (1.0 - alpha); }
  double dgp() const { return -alpha / (1.0 - alpha); }

  double gain(int k, double g) const {
    const double u = c[k] * g / (1.0 + c[k] * g);
    return gp(g) * q[k] * u;
  }
  double dgain(int k, double g) const {
    const double den = 1.0 + c[k] * g;
    return q[k] * (dgp() * c[k] * g / den + gp(g) * c[k] / (den * den));
  }
  double noise_term(int k, double g) const {
    return q[k] * gp(g) / (1.0 + c[k] * g);
  }
  double dnoise_term(int k, double g) const {
    const double den = 1.0 + c[k] * g;
    return q[k] * (dgp() / den - gp(g) * c[k] / (den * den));
  }

  double sigma_v2(const VectorXd& g) const {
    double s = N0;
    for (Eigen::Index k = 0; k < q.size(); ++k) s += noise_term(k, g[k]);
    return s;
  }
  VectorXd sigma_grad(const VectorXd& g) const {
    VectorXd r(q.size());
    for (Eigen::Index k = 0; k < q.size(); ++k) r[k] = dnoise_term(k, g[k]);
    return r;
  }
  VectorXd gains(const VectorXd& g) const {
    VectorXd r(q.size());
    for (Eigen::Index k = 0; k < q.size(); ++k) r[k] = gain(k, g[k]);
    return r;
  }

  // argmax of the per-user gain over [0, 1/alpha]; root of
  // alpha c g^2 + 2 alpha g - 1 = 0.
  double gain_argmax(int k) const {
    if (c[k] <= 0.0) return 0.0;
    return (std::sqrt(alpha * alpha + alpha * c[k]) - alpha) / (alpha * c[k]);
  }
};

// Eigenvalue map: direct per-user gains when K <= alpha*T, otherwise the
// minimal majorizing vector with K - alpha*T forced zeros, in descending
// slots. chain() applies the transposed Jacobian for gradients through the
// averaging block.
struct GainMap {
  int zeros = 0;  // K - alpha*T when positive

  VectorXd lambdas(const UserCurves& u, const VectorXd& g) const {
    VectorXd v = u.gains(g);
    if (zeros <= 0) return v;
    RealVec inc = min_majorizing_vector(v, zeros);
    return inc.reverse();
  }

  VectorXd chain(const UserCurves& u, const VectorXd& g,
                 const VectorXd& grad_lambda_desc) const {
    const int n = static_cast<int>(g.size());
    VectorXd out(n);
    if (zeros <= 0) {
      for (int k = 0; k < n; ++k)
        out[k] = grad_lambda_desc[k] * u.dgain(k, g[k]);
      return out;
    }
    VectorXd v = u.gains(g);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return v[a] < v[b]; });
    VectorXd gl_asc = grad_lambda_desc.reverse();

    // Recover the averaging block of the minimal majorizing construction.
    std::vector<double> prefix(n + 1, 0.0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[order[i]];
    int kidx = n;
    for (int j = zeros; j < n; ++j) {
      if (prefix[j] <= (j - zeros) * v[order[j]]) {
        kidx = j;
        break;
      }
    }
    double block_sum = 0.0;
    for (int i = zeros; i < kidx; ++i) block_sum += gl_asc[i];
    const double block_coef =
        kidx > zeros ? block_sum / static_cast<double>(kidx - zeros) : 0.0;

    for (int j = 0; j < n; ++j) {
      const int user = order[j];
      const double dl = (j < kidx) ? block_coef : gl_asc[j];
      out[user] = dl * u.dgain(user, g[user]);
    }
    return out;
  }
};

// Mean log det over the CRN batch, objective only. Uses the cheaper of the
// slot-side and receive-side formulations.
double batch_logdet(const CrnBatch& crn, const VectorXd& lambda, double inv_t) {
  std::vector<int> pos;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda[i] > 0.0) pos.push_back(static_cast<int>(i));
  const int np = static_cast<int>(pos.size());
  if (np == 0) return 0.0;
  double acc = 0.0;
  if (np <= crn.rx) {
    VectorXd sq(np);
    for (int i = 0; i < np; ++i) sq[i] = std::sqrt(lambda[pos[i]]);
    MatrixXcd A(np, np);
    for (const auto& M : crn.gram) {
      for (int jj = 0; jj < np; ++jj)
        for (int ii = 0; ii < np; ++ii)
          A(ii, jj) = inv_t * sq[ii] * sq[jj] * M(pos[ii], pos[jj]);
      A.diagonal().array() += 1.0;
      Eigen::LLT<MatrixXcd> llt(A);
      for (int i = 0; i < np; ++i)
        acc += 2.0 * std::log(std::real(llt.matrixLLT()(i, i)));
    }
  } else {
    const int N = crn.rx;
    MatrixXcd P(N, np);
    for (const auto& G : crn.G) {
      for (int i = 0; i < np; ++i)
        P.col(i) = std::sqrt(lambda[pos[i]]) * G.col(pos[i]);
      MatrixXcd A = MatrixXcd::Zero(N, N);
      A.selfadjointView<Eigen::Lower>().rankUpdate(P, inv_t);
      A.diagonal().array() += 1.0;
      MatrixXcd Af = A.selfadjointView<Eigen::Lower>();
      Eigen::LLT<MatrixXcd> llt(Af);
      for (int i = 0; i < N; ++i)
        acc += 2.0 * std::log(std::real(llt.matrixLLT()(i, i)));
    }
  }
  return acc / static_cast<double>(crn.draws());
}

// Objective and gradient w.r.t. lambda (receive-side formulation, which
// prices every slot including those currently at lambda = 0).
double batch_logdet_grad(const CrnBatch& crn, const VectorXd& lambda,
                         double inv_t, VectorXd& grad) {
  const int N = crn.rx;
  const int n = static_cast<int>(lambda.size());
  grad = VectorXd::Zero(n);
  std::vector<int> pos;
  for (int i = 0; i < n; ++i)
    if (lambda[i] > 0.0) pos.push_back(i);
  double acc = 0.0;
  MatrixXcd P(N, static_cast<int>(pos.size()));
  for (const auto& G : crn.G) {
    for (std::size_t i = 0; i < pos.size(); ++i)
      P.col(static_cast<int>(i)) = std::sqrt(lambda[pos[i]]) * G.col(pos[i]);
    MatrixXcd A = MatrixXcd::Zero(N, N);
    if (!pos.empty()) A.selfadjointView<Eigen::Lower>().rankUpdate(P, inv_t);
    A.diagonal().array() += 1.0;
    MatrixXcd Af = A.selfadjointView<Eigen::Lower>();
    Eigen::LLT<MatrixXcd> llt(Af);
    for (int i = 0; i < N; ++i)
      acc += 2.0 * std::log(std::real(llt.matrixLLT()(i, i)));
    const MatrixXcd Q = llt.solve(G);
    for (int j = 0; j < n; ++j)
      grad[j] += inv_t * std::real(G.col(j).dot(Q.col(j)));
  }
  const double inv_draws = 1.0 / static_cast<double>(crn.draws());
  grad *= inv_draws;
  return acc * inv_draws;
}

struct SolveContext {
  const SystemConfig* cfg = nullptr;
  UserCurves curves;
  GainMap map;
  CrnBatch crn;
  double prefactor = 0.0;  // (1 - alpha) / ln 2

  double surrogate(const VectorXd& g, double t) const {
    return prefactor * batch_logdet(crn, map.lambdas(curves, g), 1.0 / t);
  }
  double surrogate_grad(const VectorXd& g, double t, VectorXd& grad) const {
    VectorXd gl;
    const double f =
        batch_logdet_grad(crn, map.lambdas(curves, g), 1.0 / t, gl);
    grad = prefactor * map.chain(curves, g, gl);
    return prefactor * f;
  }
  double true_rate(const VectorXd& g) const {
    return surrogate(g, curves.sigma_v2(g));
  }
};

VectorXd project_box(VectorXd g, double hi) {
  for (Eigen::Index i = 0; i < g.size(); ++i)
    g[i] = std::clamp(g[i], 0.0, hi);
  return g;
}

struct InnerResult {
  VectorXd gamma;
  double kkt = 1e9;
  int iterations = 0;
};

// Maximize surrogate(g, t) over the box intersected with sigma_v2(g) <= t,
// via projected gradient on a log-barrier sequence.
InnerResult inner_solve(const SolveContext& ctx, double t, VectorXd start,
                        const PowerSolveOptions& opts) {
  const double hi = 1.0 / ctx.cfg->alpha;
  const int n = static_cast<int>(start.size());
  VectorXd g = project_box(std::move(start), hi);

  // Pull the start into the strict interior of sigma_v2 < t.
  for (int it = 0; it < 200 && ctx.curves.sigma_v2(g) >= t * (1.0 - 1e-12); ++it)
    g = 0.5 * (g + VectorXd::Constant(n, hi));
  if (ctx.curves.sigma_v2(g) >= t) return {g, 1e9, 0};

  const double f0 = std::abs(ctx.surrogate(g, t)) + 1.0;
  const double weights[] = {1e-2, 1e-5, 1e-9};
  constexpr int stages = 3;
  const int max_per_stage = std::max(50, opts.max_iterations / stages);
  double kkt = 1e9;
  int total_iters = 0;
  double step = 0.1 * hi / f0;

  for (int stage = 0; stage < stages; ++stage) {
    const double w = weights[stage] * f0;
    const double tol =
        (stage + 1 == stages) ? opts.pg_tol : std::max(opts.pg_tol, 1e-4);
    for (int it = 0; it < max_per_stage; ++it) {
      ++total_iters;
      VectorXd grad;
      const double f = ctx.surrogate_grad(g, t, grad);
      const double slack = t - ctx.curves.sigma_v2(g);
      const VectorXd sg = ctx.curves.sigma_grad(g);
      const VectorXd dphi = grad - (w / slack) * sg;
      const double phi = f + w * std::log(slack);

      kkt = (project_box(g + dphi, hi) - g).cwiseAbs().maxCoeff();
      if (kkt < tol) break;

      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        VectorXd trial = project_box(g + step * dphi, hi);
        const double tslack = t - ctx.curves.sigma_v2(trial);
        if (tslack > 0.0) {
          const double ftrial = ctx.surrogate(trial, t) + w * std::log(tslack);
          if (ftrial >= phi + 1e-4 * dphi.dot(trial - g)) {
            g = std::move(trial);
            accepted = true;
            break;
          }
        }
        step *= 0.5;
      }
      if (!accepted) break;
      step = std::min(step * 1.3, 1e6);
    }
  }
  return {g, kkt, total_iters};
}

// Exactly uniform fading: every user shares one gain curve, so designs of
// interest have j active users at a common gamma and the rest silenced
// (gamma = 1/alpha puts all power into training, i.e. no data). For fixed
// (t, j) the inner optimum is analytic: the gain v(gamma) is unimodal and
// sigma_v2 is decreasing in gamma, so gamma* = max(gain argmax, feasibility
// root). This keeps symmetric problems exactly symmetric and fast.
InnerResult inner_solve_uniform(const SolveContext& ctx, double t) {
  const SystemConfig& cfg = *ctx.cfg;
  const double hi = 1.0 / cfg.alpha;
  const int K = cfg.K;
  const int aT = cfg.train_symbols();
  const UserCurves& u = ctx.curves;

  const double ghat = u.gain_argmax(0);
  auto gamma_min_for = [&](int j) {
    // Smallest gamma with j * noise_term(gamma) <= t - N0.
    const double budget = (t - u.N0) / j;
    if (u.noise_term(0, 0.0) <= budget) return 0.0;
    double a = 0.0, b = hi;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      (u.noise_term(0, m) > budget ? a : b) = m;
    }
    return b;
  };

  if (t <= u.N0) return {VectorXd::Constant(K, hi), 0.0, 0};

  // Candidate active counts. For j >= aT the rate depends on j and gamma
  // only through j * v(gamma), so that family collapses to one candidate.
  std::vector<int> cand;
  const int jmax = K;
  const int jcap = std::min(K, aT);
  for (int j : {1, jcap / 4, jcap / 2, 3 * jcap / 4, jcap})
    if (j >= 1) cand.push_back(j);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  struct Pick {
    int j = 0;
    double gamma = 0.0;
    double value = -1.0;
  } best;

  auto eval_direct = [&](int j) {
    const double gmin = gamma_min_for(j);
    const double g = std::max(ghat, gmin);
    VectorXd gv = VectorXd::Constant(K, hi);
    gv.head(j).setConstant(g);
    const double val = ctx.surrogate(gv, t);
    if (val > best.value) best = {j, g, val};
  };

  for (int j : cand) eval_direct(j);

  if (K > aT) {
    // j > aT: lambda has aT equal slots of j*v/aT; maximize j*v(gamma_j^*).
    int bestj = -1;
    double bestjv = -1.0;
    for (int j = aT; j <= jmax; ++j) {
      const double g = std::max(ghat, gamma_min_for(j));
      const double jv = j * u.gain(0, g);
      if (jv > bestjv) {
        bestjv = jv;
        bestj = j;
      }
    }
    if (bestj > 0) eval_direct(bestj);
  }

  VectorXd gv = VectorXd::Constant(K, hi);
  gv.head(best.j).setConstant(best.gamma);
  // gamma* is either the analytic gain argmax or an active-constraint /
  // box-face point, all stationary; report the tiny residual of the root.
  const double kkt =
      best.gamma == ghat ? std::abs(u.dgain(0, ghat)) * 1e-3 : 0.0;
  return {gv, kkt, 1};
}

PowerSplit finalize_split(const SystemConfig& cfg, const VectorXd& d,
                          const VectorXd& gamma) {
  PowerSplit p;
  const int K = static_cast<int>(gamma.size());
  p.gamma = gamma;
  p.gamma_prime.resize(K);
  p.active.assign(K, true);
  for (int k = 0; k < K; ++k) {
    p.gamma_prime[k] = (1.0 - cfg.alpha * gamma[k]) / (1.0 - cfg.alpha);
    if (p.gamma_prime[k] < 1e-12 || d[k] <= 0.0) {
      // A user with no data power (or no channel) contributes nothing;
      // canonicalize to the inactive state.
      p.gamma[k] = 0.0;
      p.gamma_prime[k] = 0.0;
      p.active[k] = false;
    } else if (p.gamma_prime[k] < 0.0) {
      p.gamma_prime[k] = 0.0;
    }
  }
  return p;
}

PowerSolveResult solve_common(const SystemConfig& cfg,
                              const FadingProfile& fading,
                              const PowerSolveOptions& opts, bool kgt) {
  cfg.validate();
  fading.validate();
  const int K = cfg.K;
  const int aT = cfg.train_symbols();
  if (fading.d.size() != K)
    throw std::invalid_argument("solve_power: fading length mismatch");
  if (!kgt && K > aT)
    throw std::invalid_argument("solve_power_kleq: requires K <= alpha*T");
  if (kgt && K <= aT)
    throw std::invalid_argument("solve_power_kgt: requires K > alpha*T");

  SolveContext ctx;
  ctx.cfg = &cfg;
  ctx.curves = UserCurves::make(cfg, fading.d);
  ctx.map.zeros = kgt ? K - aT : 0;
  ctx.crn = CrnBatch::make(cfg.N, K, opts.mc_draws, mix_seed(opts.seed, kgt));
  ctx.prefactor = (1.0 - cfg.alpha) / kLn2;

  const double hi_box = 1.0 / cfg.alpha;
  const bool symmetric = fading.is_uniform() && fading.d[0] > 0.0;

  const double t_lo = cfg.N0;
  const double t_hi = ctx.curves.q.sum() / (1.0 - cfg.alpha) + cfg.N0;
  const int nt = std::max(2, opts.t_grid);

  // Closed-form starts: uniform high-SNR gamma, per-user gain argmax, and
  // for K > alpha*T the point that silences the weakest users.
  const int K_active = std::min(K, aT);
  const double g3 =
      1.0 / (cfg.alpha *
             (1.0 + std::sqrt((1.0 - cfg.alpha) * cfg.T / K_active)));
  std::vector<VectorXd> starts;
  starts.push_back(VectorXd::Constant(K, std::min(g3, hi_box)));
  {
    VectorXd gmax(K);
    for (int k = 0; k < K; ++k) gmax[k] = ctx.curves.gain_argmax(k);
    starts.push_back(gmax);
  }
  VectorXd deactivate_start;
  if (kgt) {
    deactivate_start = VectorXd::Constant(K, hi_box);
    deactivate_start.head(aT).setConstant(std::min(g3, hi_box));
    starts.push_back(deactivate_start);
  }

  VectorXd best_gamma;
  double best_rate = -1.0;
  double best_t = t_hi;
  double best_kkt = 1e9;
  int total_iters = 0;

  auto consider = [&](const VectorXd& g, double t, double kkt) {
    const double r = ctx.true_rate(g);
    const double tie = 1e-9 * std::max(1.0, std::abs(best_rate));
    if (r > best_rate + tie || (r > best_rate - tie && t < best_t)) {
      best_rate = r;
      best_gamma = g;
      best_t = t;
      best_kkt = kkt;
    }
  };

  for (const auto& s : starts) {
    const VectorXd g = project_box(s, hi_box);
    consider(g, ctx.curves.sigma_v2(g), 1e9);
  }

  VectorXd warm = project_box(starts.front(), hi_box);
  VectorXd warm_deact = kgt ? project_box(deactivate_start, hi_box) : VectorXd();
  auto solve_at = [&](double t) -> InnerResult {
    InnerResult ir;
    if (symmetric) {
      ir = inner_solve_uniform(ctx, t);
    } else {
      ir = inner_solve(ctx, t, warm, opts);
      if (kgt) {
        // The silenced-user basin may be separated from the warm chain.
        InnerResult alt = inner_solve(ctx, t, warm_deact, opts);
        total_iters += alt.iterations;
        warm_deact = alt.gamma;
        if (ctx.true_rate(alt.gamma) > ctx.true_rate(ir.gamma)) std::swap(ir, alt);
      }
      warm = ir.gamma;
    }
    total_iters += ir.iterations;
    consider(ir.gamma, t, ir.kkt);
    return ir;
  };

  std::vector<double> tgrid(nt);
  for (int i = 0; i < nt; ++i)
    tgrid[i] = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (nt - 1));
  int best_idx = -1;
  for (int i = 0; i < nt; ++i) {
    if (tgrid[i] <= t_lo * (1.0 + 1e-12)) continue;  // all-training point
    const double before = best_rate;
    solve_at(tgrid[i]);
    if (best_rate > before) best_idx = i;
  }

  // The grid quantizes the active noise-level constraint (and with it the
  // returned gammas); a short golden-section pass on log t around the best
  // grid point removes that bias.
  if (best_idx >= 0 && opts.t_refine_tol > 0.0) {
    const double invphi = 0.6180339887498949;
    double la = std::log(tgrid[std::max(0, best_idx - 1)]);
    double lb = std::log(tgrid[std::min(nt - 1, best_idx + 1)]);
    auto val = [&](double lt) {
      const InnerResult ir = solve_at(std::exp(lt));
      return ctx.true_rate(ir.gamma);
    };
    double x1 = lb - invphi * (lb - la), x2 = la + invphi * (lb - la);
    double f1 = val(x1), f2 = val(x2);
    int guard = 0;
    while (lb - la > opts.t_refine_tol && ++guard < 80) {
      if (f1 < f2) {
        la = x1;
        x1 = x2;
        f1 = f2;
        x2 = la + invphi * (lb - la);
        f2 = val(x2);
      } else {
        lb = x2;
        x2 = x1;
        f2 = f1;
        x1 = lb - invphi * (lb - la);
        f1 = val(x1);
      }
    }
  }

  // If a raw closed-form candidate is still the best point, polish it so the
  // returned iterate carries a meaningful optimality residual.
  if (best_kkt > opts.kkt_tol && !symmetric) {
    const double t = std::max(ctx.curves.sigma_v2(best_gamma) * 1.001,
                              t_lo * (1.0 + 1e-9));
    InnerResult ir = inner_solve(ctx, t, best_gamma, opts);
    total_iters += ir.iterations;
    const double tie = 1e-9 * std::max(1.0, std::abs(best_rate));
    if (ctx.true_rate(ir.gamma) > best_rate - tie) {
      best_gamma = ir.gamma;
      best_rate = ctx.true_rate(ir.gamma);
      best_t = t;
      best_kkt = ir.kkt;
    }
  }

  PowerSolveResult res;
  res.split = finalize_split(cfg, fading.d, best_gamma);
  res.rate_bits = best_rate;
  res.sigma_v2 = ctx.curves.sigma_v2(best_gamma);
  res.t_best = best_t;
  res.kkt_residual = best_kkt;
  res.iterations = total_iters;
  res.converged = best_kkt <= opts.kkt_tol;
  if (!res.converged && opts.throw_on_nonconvergence)
    throw PowerSolveError("power solve did not meet the KKT tolerance", res);
  return res;
}

}  // namespace

EffectiveGains effective_gains(const SystemConfig& cfg,
                               const FadingProfile& fading,
                               const PowerSplit& power) {
  cfg.validate();
  const int K = cfg.K;
  const int aT = cfg.train_symbols();
  const VectorXd v = effective_gain_diagonal(cfg, fading.d, power);
  EffectiveGains g;
  g.sigma_v2 = sigma_v2_closed_form(cfg, fading.d, power);
  const int n = std::min(K, aT);
  if (K <= aT) {
    VectorXd s = v;
    std::sort(s.data(), s.data() + s.size(), std::greater<double>());
    g.lambdas = s;
  } else {
    RealVec inc = min_majorizing_vector(v, K - aT);
    g.lambdas = inc.reverse().head(n);
  }
  return g;
}

CrnBatch CrnBatch::make(int rx, int slots, int draws, std::uint64_t seed) {
  CrnBatch b;
  b.rx = rx;
  b.slots = slots;
  b.G.reserve(draws);
  b.gram.reserve(draws);
  for (int i = 0; i < draws; ++i) {
    Rng rng(mix_seed(seed, 0xC4AFULL, i));
    MatrixXcd G(rx, slots);
    for (int j = 0; j < slots; ++j)
      for (int r = 0; r < rx; ++r) G(r, j) = rng.cnormal();
    MatrixXcd M = MatrixXcd::Zero(slots, slots);
    M.selfadjointView<Eigen::Lower>().rankUpdate(G.adjoint(), 1.0);
    b.G.push_back(std::move(G));
    b.gram.emplace_back(M.selfadjointView<Eigen::Lower>());
  }
  return b;
}

PowerSolveResult solve_power_kleq_detailed(const SystemConfig& cfg,
                                           const FadingProfile& fading,
                                           const PowerSolveOptions& opts) {
  return solve_common(cfg, fading, opts, false);
}

PowerSplit solve_power_kleq(const SystemConfig& cfg,
                            const FadingProfile& fading,
                            const PowerSolveOptions& opts) {
  return solve_power_kleq_detailed(cfg, fading, opts).split;
}

PowerSolveResult solve_power_kgt_detailed(const SystemConfig& cfg,
                                          const FadingProfile& fading,
                                          const PowerSolveOptions& opts) {
  return solve_common(cfg, fading, opts, true);
}

PowerSplit solve_power_kgt(const SystemConfig& cfg,
                           const FadingProfile& fading,
                           const PowerSolveOptions& opts) {
  return solve_power_kgt_detailed(cfg, fading, opts).split;
}

PowerSplit gamma_highsnr(const SystemConfig& cfg, int K_active) {
  cfg.validate();
  if (K_active < 1 || K_active > cfg.K)
    throw std::invalid_argument("gamma_highsnr: bad active count");
  const double g =
      1.0 / (cfg.alpha *
             (1.0 + std::sqrt((1.0 - cfg.alpha) * cfg.T / K_active)));
  const double gp = (1.0 - cfg.alpha * g) / (1.0 - cfg.alpha);
  PowerSplit p;
  p.gamma = VectorXd::Zero(cfg.K);
  p.gamma_prime = VectorXd::Zero(cfg.K);
  p.active.assign(cfg.K, false);
  for (int k = 0; k < K_active; ++k) {
    p.gamma[k] = g;
    p.gamma_prime[k] = gp;
    p.active[k] = true;
  }
  return p;
}

double gamma_uniform_opt(const SystemConfig& cfg, double d) {
  cfg.validate();
  const double rho = cfg.rho0();
  const double a = cfg.alpha;
  const double K = cfg.K;
  const double T = cfg.T;
  double mu;
  if (K <= a * T + 0.5) {
    mu = rho * d * d * (K - (1.0 - a) * T) / (1.0 - a + rho * d * d * K);
  } else {
    mu = rho * d * d * (2.0 * a - 1.0) * K / (a * (1.0 - a + rho * d * d * K));
  }
  const double rad = 1.0 - mu;
  if (rad < 0.0)
    throw std::domain_error("gamma_uniform_opt: negative discriminant");
  const double g = 1.0 / (a * (1.0 + std::sqrt(rad)));
  return std::clamp(g, 0.0, 1.0 / a);
}

double tau_effective(const SystemConfig& cfg, double d, double gamma,
                     double gamma_prime, int K) {
  const double rho = cfg.rho0();
  const double a = cfg.alpha;
  const double T = cfg.T;
  const double d2 = d * d;
  if (K <= a * T + 0.5) {
    return a * gamma * gamma_prime * rho * rho * d2 * d2 * T /
           (rho * d2 * (gamma_prime * K + a * gamma * T) + 1.0);
  }
  const double gg = gamma * gamma_prime * rho * rho * d2 * d2 * K;
  return gg / (gg * (K - a * T) + rho * d2 * K * (gamma + gamma_prime) + 1.0);
}

VectorXd lambda_of_gamma(const SystemConfig& cfg, const FadingProfile& fading,
                         const VectorXd& gamma) {
  UserCurves u = UserCurves::make(cfg, fading.d);
  GainMap map;
  map.zeros = std::max(0, cfg.K - cfg.train_symbols());
  return map.lambdas(u, gamma);
}

double solver_surrogate_rate(const SystemConfig& cfg,
                             const FadingProfile& fading, const CrnBatch& crn,
                             const VectorXd& gamma, double t) {
  UserCurves u = UserCurves::make(cfg, fading.d);
  GainMap map;
  map.zeros = std::max(0, cfg.K - cfg.train_symbols());
  const double pre = (1.0 - cfg.alpha) / kLn2;
  return pre * batch_logdet(crn, map.lambdas(u, gamma), 1.0 / t);
}

double solver_true_rate(const SystemConfig& cfg, const FadingProfile& fading,
                        const CrnBatch& crn, const VectorXd& gamma) {
  UserCurves u = UserCurves::make(cfg, fading.d);
  return solver_surrogate_rate(cfg, fading, crn, gamma, u.sigma_v2(gamma));
}

}  // namespace mumimo
