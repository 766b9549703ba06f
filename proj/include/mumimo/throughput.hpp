#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mumimo/channel.hpp"
#include "mumimo/power_alloc.hpp"

namespace mumimo {

enum class RateMethod { monte_carlo, asymptotic };

struct ThroughputReport {
  double rate_bits_per_symbol = 0.0;
  RateMethod method = RateMethod::monte_carlo;
  long trials = 0;
  std::optional<double> ci_halfwidth;  // 95% half-width, Monte Carlo only
};

// Monte Carlo estimate of the achievable rate
//   (1 - alpha) E[ log2 det(I_N + G Lambda G^H / sigma_v^2) ],
// with G an N x n_active i.i.d. CN(0,1) coupling redrawn per trial.
// Per-trial seeds derive from the master seed by counter, and the reduction
// is chunked in trial order, so results do not depend on worker count.
ThroughputReport mc_throughput(const SystemConfig& cfg,
                               const EffectiveGains& gains, int n_active,
                               long trials, std::uint64_t seed);

// Limiting spectral support of the per-antenna-normalized coupling Gram.
struct MPSupport {
  double a = 0.0;
  double b = 0.0;
  enum class Regime { omega_le_alpha, omega_gt_alpha } regime =
      Regime::omega_le_alpha;
};
MPSupport mp_support(double beta, double omega, double alpha);

// Marchenko-Pastur style density of the nonzero eigenvalues,
//   f(x) = sqrt((x - a)^+ (b - x)^+) / (2 pi x),
// with edges from beta when omega <= alpha and from alpha*beta/omega
// otherwise. Throws std::domain_error for lambda <= 0.
double mp_density(double lambda, double beta, double omega, double alpha);

// Large-system rate: (1-alpha) N times the spectral integral of
// log2(1 + tau N x) against the density above, evaluated by Gauss-Legendre
// quadrature after the x = a + (b-a) sin^2(theta) substitution that absorbs
// the square-root edges. Uniform fading with K/N and K/T held by cfg.
ThroughputReport asymptotic_throughput(const SystemConfig& cfg, double d,
                                       double gamma, double gamma_prime,
                                       int K);

// Honest evaluation of an arbitrary pilot: whitening, equivalent noise
// power, the whitened gain spectrum, then Monte Carlo.
ThroughputReport evaluate_design(const SystemConfig& cfg,
                                 const FadingProfile& fading,
                                 const PilotMatrix& pilot,
                                 const PowerSplit& power, long trials,
                                 std::uint64_t seed);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace mumimo
