#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mumimo/channel.hpp"

namespace mumimo {

// Effective rate eigenvalues plus the equivalent noise power for a design
// that meets its pilot Gram conditions. lambdas is sorted descending and
// trimmed to min(K, alpha*T) entries.
struct EffectiveGains {
  VectorXd lambdas;
  double sigma_v2 = 0.0;
};

// K <= alpha*T: per-user gains directly. K > alpha*T: the minimal majorizing
// vector of the per-user gain diagonal with K - alpha*T forced zeros.
EffectiveGains effective_gains(const SystemConfig& cfg,
                               const FadingProfile& fading,
                               const PowerSplit& power);

// Common-random-numbers batch for the power solvers: a fixed set of Gaussian
// couplings (and their column Grams) shared across every objective
// evaluation, so the optimized surrogate is deterministic and smooth.
struct CrnBatch {
  int rx = 0;       // receive dimension N
  int slots = 0;    // eigenvalue slots (columns)
  std::vector<MatrixXcd> G;
  std::vector<MatrixXcd> gram;

  static CrnBatch make(int rx, int slots, int draws, std::uint64_t seed);
  int draws() const { return static_cast<int>(G.size()); }
};

struct PowerSolveOptions {
  int mc_draws = 200;         // CRN batch size
  int t_grid = 40;            // log-spaced noise-level grid points
  double t_refine_tol = 1e-4; // golden-section refinement around the best t
  int max_iterations = 10000;
  double pg_tol = 1e-7;       // projected-gradient stop
  double kkt_tol = 1e-6;
  std::uint64_t seed = 0x5EEDULL;
  bool throw_on_nonconvergence = true;
};

struct PowerSolveResult {
  PowerSplit split;
  double rate_bits = 0.0;    // surrogate rate at the returned point
  double sigma_v2 = 0.0;
  double t_best = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Non-convergence carries the best iterate for diagnosis.
struct PowerSolveError : std::runtime_error {
  PowerSolveResult best;
  PowerSolveError(const std::string& what, PowerSolveResult b)
      : std::runtime_error(what), best(std::move(b)) {}
};

// Training-power optimization for K <= alpha*T (per-user gains feed the rate
// directly). Auxiliary noise level t is swept on a log grid; for each t the
// concave inner problem is solved by projected gradient over the box
// [0, 1/alpha]^K with a log barrier on sigma_v^2 <= t; the best point by the
// true surrogate rate wins (lowest t on ties). gamma'_k = (1-alpha
// gamma_k)/(1-alpha) throughout. Exactly uniform fading is solved on the
// symmetric line, which keeps the output exactly symmetric.
PowerSolveResult solve_power_kleq_detailed(const SystemConfig& cfg,
                                           const FadingProfile& fading,
                                           const PowerSolveOptions& opts = {});
PowerSplit solve_power_kleq(const SystemConfig& cfg,
                            const FadingProfile& fading,
                            const PowerSolveOptions& opts = {});

// Same contract for K > alpha*T with the majorization-linked eigenvalue map
// (minimal majorizing vector with K - alpha*T zeros). Multi-started from the
// uniform high-SNR point and the deactivation point.
PowerSolveResult solve_power_kgt_detailed(const SystemConfig& cfg,
                                          const FadingProfile& fading,
                                          const PowerSolveOptions& opts = {});
PowerSplit solve_power_kgt(const SystemConfig& cfg,
                           const FadingProfile& fading,
                           const PowerSolveOptions& opts = {});

// High-SNR closed form: uniform gamma = 1/(alpha (1 + sqrt((1-alpha) T /
// K_active))) over the K_active strongest users, full power split, zeros for
// the rest. Callers use K_active = min(K, alpha*T).
PowerSplit gamma_highsnr(const SystemConfig& cfg, int K_active);

// Uniform-fading closed-form optimizer of the effective SNR tau.
double gamma_uniform_opt(const SystemConfig& cfg, double d);

// Effective SNR for uniform fading (per-branch closed forms).
double tau_effective(const SystemConfig& cfg, double d, double gamma,
                     double gamma_prime, int K);

// --- solver instrumentation (exposed for verification) ---

// Branch-appropriate eigenvalue map lambda(gamma) used by the solvers.
VectorXd lambda_of_gamma(const SystemConfig& cfg, const FadingProfile& fading,
                         const VectorXd& gamma);

// Inner surrogate at fixed noise level t (bits/symbol with the (1-alpha)
// prefactor), and the true surrogate rate with t = sigma_v^2(gamma).
double solver_surrogate_rate(const SystemConfig& cfg,
                             const FadingProfile& fading, const CrnBatch& crn,
                             const VectorXd& gamma, double t);
double solver_true_rate(const SystemConfig& cfg, const FadingProfile& fading,
                        const CrnBatch& crn, const VectorXd& gamma);

}  // namespace mumimo
