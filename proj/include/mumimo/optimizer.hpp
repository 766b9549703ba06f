#pragma once

#include <cstdint>
#include <vector>

#include "mumimo/pilot_design.hpp"
#include "mumimo/power_alloc.hpp"
#include "mumimo/throughput.hpp"

namespace mumimo {

struct DesignPoint {
  double alpha = 0.0;
  int K_total = 0;
  std::vector<int> active_set;  // sorted user indices (0-based, d descending)
  PowerSplit power;
  PilotKind pilot_kind = PilotKind::orthogonal;
  ThroughputReport rate;
};

// The min(K, alpha*T) strongest users; ties in d resolve to the lowest index
// because profiles are stably sorted.
std::vector<int> select_users(const FadingProfile& fading, double alpha, int T,
                              int K);

// Characteristic function whose positive root x* locates the throughput-
// optimal user load x = rho0 d^2 K for uniform fading. f(0+) > 0 and
// f(x) -> -inf, with a single sign change.
double optimal_k_equation(double x, double alpha);

// Root of the characteristic function by bracketed bisection (geometric
// bracket expansion; loud failure if no sign change is found).
double optimal_k_root(double alpha);

// Optimal user count max{x*/(rho0 d^2), alpha*T}, with the floor/ceil
// neighbor decided by the better effective SNR.
int optimal_k_uniform(double alpha, int T, double rho0, double d);

struct PipelineOptions {
  std::vector<int> alphaT_grid;  // empty: evenly strided default grid
  std::vector<int> K_grid;       // empty: {config.K}
  PowerSolveOptions solver;      // non-convergence never throws inside pipelines
  long scan_trials = 192;        // Monte Carlo budget of the grid scan
  int alpha_grid_points = 19;    // default grid size when alphaT_grid empty
};

std::vector<int> make_alpha_grid(int T, int max_points);

// Relaxed-optimum search over the (alpha, K) grid: orthogonal-pilot branch
// for K <= alpha*T, majorization-linked gains otherwise, power by the convex
// solvers plus closed-form candidates. Grid argmax is scanned with a common
// seed per point and re-evaluated at full `trials`; ties prefer smaller
// alpha, then smaller K.
DesignPoint upper_bound_pipeline(const SystemConfig& cfg,
                                 const FadingProfile& fading, long trials,
                                 std::uint64_t seed,
                                 const PipelineOptions& opts = {});

// Achievable design: strongest min(K, alpha*T) users, orthogonal training,
// restricted power optimization.
DesignPoint lower_bound_pipeline(const SystemConfig& cfg,
                                 const FadingProfile& fading, long trials,
                                 std::uint64_t seed,
                                 const PipelineOptions& opts = {});

struct UniformPipelineOptions {
  std::vector<int> alphaT_grid;
  int alpha_grid_points = 19;
  long scan_trials = 192;
  bool use_asymptotic = false;  // report via the large-system formula instead
  int K_cap = 1000000;
};

// Uniform-fading exact design: per alpha, the closed-form K and gamma, rated
// through the effective SNR; argmax over alpha.
DesignPoint optimize_uniform(const SystemConfig& cfg, double d, long trials,
                             std::uint64_t seed,
                             const UniformPipelineOptions& opts = {});

// Reference curve: full-power users, CN(0,1) pilot rows rescaled to the
// power constraint, honest evaluation; alpha searched on the same grid.
DesignPoint random_pilot_baseline(const SystemConfig& cfg,
                                  const FadingProfile& fading, long trials,
                                  std::uint64_t seed,
                                  const PipelineOptions& opts = {});

}  // namespace mumimo
