#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace mumimo {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

// Frame-level system parameters. Powers are linear; the harness converts dB
// once at ingestion. alpha must split the coherence time into integer
// training and data symbol counts.
struct SystemConfig {
  int N = 1;           // BS antennas
  int K = 1;           // users
  int T = 2;           // coherence length in symbols
  double alpha = 0.5;  // training fraction, in (0,1)
  double P0 = 1.0;     // per-user power
  double N0 = 1.0;     // noise power

  int train_symbols() const;                  // alpha*T, validated integral
  int data_symbols() const { return T - train_symbols(); }
  double rho0() const { return P0 / N0; }
  void validate() const;                      // throws std::invalid_argument
};

// Large-scale fading, sorted descending. positions_m kept for provenance
// when the profile comes from a sampled user drop.
struct FadingProfile {
  VectorXd d;
  std::vector<double> positions_m;

  bool is_uniform(double rel_tol = 1e-12) const;
  void validate() const;
};

// Per-user training/data power coefficients. Inactive users carry zeros.
struct PowerSplit {
  VectorXd gamma;
  VectorXd gamma_prime;
  std::vector<bool> active;

  static PowerSplit uniform(int K, double gamma, double gamma_prime);
  void validate(double alpha) const;
  int active_count(double tol = 1e-12) const;
};

struct PilotMatrix {
  MatrixXcd Xp;         // K x alpha*T
  VectorXd row_powers;  // ||row k||^2 / (alpha*T)

  static PilotMatrix from_matrix(MatrixXcd Xp);
};

struct NoiseModel {
  double sigma_v2 = 0.0;  // equivalent data-phase noise power, >= N0
};

// Users dropped uniformly on a disk of the given radius; d_k = r_k^{-2}
// (path-loss exponent 4). Draws are sequential in user index, so profiles
// with the same seed nest: the first K radii coincide for any larger K.
FadingProfile sample_scenario(int K, double radius_m, std::uint64_t seed);

// i.i.d. CN(0,1) small-scale channel matrix, N x K.
MatrixXcd sample_small_scale(int N, int K, std::uint64_t seed);

// MMSE channel estimate from training observations:
//   Hhat = Yp (Xp^H D^2 Xp + N0 I)^{-1} Xp^H D.
MatrixXcd mmse_estimate(const MatrixXcd& Yp, const MatrixXcd& Xp,
                        const VectorXd& d, double N0);

// Per-user estimation error covariance:
//   M = I_K - D Xp (Xp^H D^2 Xp + N0 I)^{-1} Xp^H D,
// Hermitian PSD with eigenvalues in [0,1].
MatrixXcd mmse_error_matrix(const MatrixXcd& Xp, const VectorXd& d, double N0);

// Whitened training matrix Xt = D Xp (Xp^H D^2 Xp + N0 I)^{-1/2};
// Xt Xt^H = I_K - M and all singular values lie in [0,1).
MatrixXcd whitened_pilot(const MatrixXcd& Xp, const VectorXd& d, double N0);

// Equivalent noise power sigma_v^2 = tr(M D^2 R_Xd) + N0 from an explicit
// error matrix, where R_Xd = diag(gamma'_k P0).
NoiseModel equivalent_noise_power(const MatrixXcd& error_matrix,
                                  const VectorXd& d, const PowerSplit& power,
                                  double P0, double N0);

// Closed form valid for pilots meeting their Gram conditions:
//   sigma_v^2 = sum_k gamma'_k d_k^2 P0 / (1 + alpha gamma_k rho0 d_k^2 T) + N0.
double sigma_v2_closed_form(const SystemConfig& cfg, const VectorXd& d,
                            const PowerSplit& power);

// Per-user post-training effective gain,
//   g_k = alpha gamma_k gamma'_k rho0 P0 d_k^4 T / (1 + alpha gamma_k rho0 d_k^2 T),
// which is both the per-user rate eigenvalue under orthogonal training and
// the diagonal the relaxed pilot optimum must reproduce.
VectorXd effective_gain_diagonal(const SystemConfig& cfg, const VectorXd& d,
                                 const PowerSplit& power);

}  // namespace mumimo
