#include "mumimo/throughput.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mumimo/parallel.hpp"
#include "mumimo/rng.hpp"

namespace mumimo {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// log det(I + inv_noise * G Lambda G^H) in nats, worked in the smaller of
// the two Gram dimensions.
double coupled_logdet(const MatrixXcd& G, const VectorXd& lambda,
                      double inv_noise) {
  const int N = static_cast<int>(G.rows());
  const int n = static_cast<int>(G.cols());
  double acc = 0.0;
  if (n <= N) {
    MatrixXcd A = MatrixXcd::Zero(n, n);
    const MatrixXcd P = G * lambda.cwiseSqrt().asDiagonal();
    A.selfadjointView<Eigen::Lower>().rankUpdate(P.adjoint(), inv_noise);
    A.diagonal().array() += 1.0;
    MatrixXcd Af = A.selfadjointView<Eigen::Lower>();
    Eigen::LLT<MatrixXcd> llt(Af);
    for (int i = 0; i < n; ++i)
      acc += 2.0 * std::log(std::real(llt.matrixLLT()(i, i)));
  } else {
    MatrixXcd A = MatrixXcd::Zero(N, N);
    const MatrixXcd P = G * lambda.cwiseSqrt().asDiagonal();
    A.selfadjointView<Eigen::Lower>().rankUpdate(P, inv_noise);
    A.diagonal().array() += 1.0;
    MatrixXcd Af = A.selfadjointView<Eigen::Lower>();
    Eigen::LLT<MatrixXcd> llt(Af);
    for (int i = 0; i < N; ++i)
      acc += 2.0 * std::log(std::real(llt.matrixLLT()(i, i)));
  }
  return acc;
}

}  // namespace

ThroughputReport mc_throughput(const SystemConfig& cfg,
                               const EffectiveGains& gains, int n_active,
                               long trials, std::uint64_t seed) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("mc_throughput: trials >= 1");
  const int cap = std::min(cfg.K, cfg.train_symbols());
  if (n_active < 0 || n_active > cap)
    throw std::invalid_argument("mc_throughput: n_active exceeds min(K, aT)");
  if (gains.sigma_v2 <= 0.0)
    throw std::invalid_argument("mc_throughput: nonpositive noise power");

  // Only strictly positive gains contribute; zero slots are exact zeros.
  const int navail = std::min<int>(n_active, static_cast<int>(gains.lambdas.size()));
  int npos = 0;
  while (npos < navail && gains.lambdas[npos] > 0.0) ++npos;
  const VectorXd lam = gains.lambdas.head(npos);
  const double inv_noise = 1.0 / gains.sigma_v2;
  const double pre = (1.0 - cfg.alpha) / kLn2;

  std::vector<double> rates(static_cast<std::size_t>(trials), 0.0);
  if (npos > 0) {
    const long chunk = 64;
    const long nchunks = (trials + chunk - 1) / chunk;
    parallel_for(static_cast<std::size_t>(nchunks), [&](std::size_t ci) {
      const long lo = static_cast<long>(ci) * chunk;
      const long hi = std::min(trials, lo + chunk);
      MatrixXcd G(cfg.N, npos);
      for (long t = lo; t < hi; ++t) {
        Rng rng(mix_seed(seed, 0x7121ULL, static_cast<std::uint64_t>(t)));
        for (int j = 0; j < npos; ++j)
          for (int i = 0; i < cfg.N; ++i) G(i, j) = rng.cnormal();
        rates[static_cast<std::size_t>(t)] =
            pre * coupled_logdet(G, lam, inv_noise);
      }
    });
  }

  double sum = 0.0;
  for (double r : rates) sum += r;
  const double mean = sum / static_cast<double>(trials);
  double ssq = 0.0;
  for (double r : rates) ssq += (r - mean) * (r - mean);
  const double ci =
      trials > 1 ? 1.96 * std::sqrt(ssq / (static_cast<double>(trials) - 1.0) /
                                    static_cast<double>(trials))
                 : 0.0;

  ThroughputReport rep;
  rep.rate_bits_per_symbol = mean;
  rep.method = RateMethod::monte_carlo;
  rep.trials = trials;
  rep.ci_halfwidth = ci;
  return rep;
}

MPSupport mp_support(double beta, double omega, double alpha) {
  if (!(beta > 0.0)) throw std::domain_error("mp_support: beta must be > 0");
  MPSupport s;
  double ratio = beta;
  if (omega > alpha) {
    ratio = alpha * beta / omega;
    s.regime = MPSupport::Regime::omega_gt_alpha;
  }
  const double r = std::sqrt(ratio);
  s.a = (1.0 - r) * (1.0 - r);
  s.b = (1.0 + r) * (1.0 + r);
  return s;
}

double mp_density(double lambda, double beta, double omega, double alpha) {
  if (!(lambda > 0.0))
    throw std::domain_error("mp_density: lambda must be positive");
  const MPSupport s = mp_support(beta, omega, alpha);
  const double up = std::max(0.0, lambda - s.a);
  const double dn = std::max(0.0, s.b - lambda);
  return std::sqrt(up * dn) / (2.0 * std::numbers::pi * lambda);
}

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

ThroughputReport asymptotic_throughput(const SystemConfig& cfg, double d,
                                       double gamma, double gamma_prime,
                                       int K) {
  cfg.validate();
  if (K < 1) throw std::invalid_argument("asymptotic_throughput: K >= 1");
  const double beta = static_cast<double>(K) / cfg.N;
  const double omega = static_cast<double>(K) / cfg.T;
  const double tau = tau_effective(cfg, d, gamma, gamma_prime, K);
  const double coef = tau * cfg.N;
  const MPSupport s = mp_support(beta, omega, cfg.alpha);

  ThroughputReport rep;
  rep.method = RateMethod::asymptotic;
  rep.trials = 0;
  if (coef <= 0.0) {
    rep.rate_bits_per_symbol = 0.0;
    return rep;
  }

  // x = a + (b-a) sin^2(theta) removes both square-root edge singularities;
  // 256 Gauss-Legendre nodes resolve the remaining smooth integrand far
  // below the 1e-6 target.
  static thread_local std::vector<double> nodes, weights;
  if (nodes.size() != 256) gauss_legendre(256, nodes, weights);
  const double width = s.b - s.a;
  double integral = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double theta = (nodes[i] + 1.0) * std::numbers::pi / 4.0;
    const double sn = std::sin(theta), cs = std::cos(theta);
    const double x = s.a + width * sn * sn;
    const double f = std::log1p(coef * x) / kLn2 * width * width * sn * sn *
                     cs * cs / (std::numbers::pi * x);
    integral += weights[i] * (std::numbers::pi / 4.0) * f;
  }
  rep.rate_bits_per_symbol = (1.0 - cfg.alpha) * cfg.N * integral;
  return rep;
}

ThroughputReport evaluate_design(const SystemConfig& cfg,
                                 const FadingProfile& fading,
                                 const PilotMatrix& pilot,
                                 const PowerSplit& power, long trials,
                                 std::uint64_t seed) {
  cfg.validate();
  const VectorXd& d = fading.d;
  const MatrixXcd Xt = whitened_pilot(pilot.Xp, d, cfg.N0);

  VectorXd rxd(d.size());
  for (Eigen::Index k = 0; k < d.size(); ++k)
    rxd[k] = power.gamma_prime[k] * cfg.P0;

  // sigma_v^2 = tr((I - Xt Xt^H) D^2 R_Xd) + N0.
  double sigma = cfg.N0;
  const MatrixXcd XtXt = Xt * Xt.adjoint();
  for (Eigen::Index k = 0; k < d.size(); ++k)
    sigma += (1.0 - std::real(XtXt(k, k))) * d[k] * d[k] * rxd[k];

  // Whitened gain spectrum: eigenvalues of Xt^H D R_Xd D Xt.
  const MatrixXcd S =
      Xt.adjoint() * (d.cwiseProduct(d).cwiseProduct(rxd)).asDiagonal() * Xt;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (S + S.adjoint()));
  const int n = std::min(cfg.K, cfg.train_symbols());
  EffectiveGains gains;
  gains.sigma_v2 = sigma;
  gains.lambdas = es.eigenvalues().reverse().head(n).cwiseMax(0.0);
  return mc_throughput(cfg, gains, n, trials, seed);
}

}  // namespace mumimo
