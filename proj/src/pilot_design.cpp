#include "mumimo/pilot_design.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mumimo/majorization.hpp"
#include "mumimo/rng.hpp"

namespace mumimo {

namespace {

using cxd = std::complex<double>;

MatrixXcd gaussian_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  MatrixXcd G(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) G(i, j) = rng.cnormal();
  return G;
}

// rows x cols slice of a Haar-like frame: adjoint of the thin Q factor of a
// seeded Gaussian, so the rows are orthonormal. Needs rows <= cols.
MatrixXcd orthonormal_rows(int rows, int cols, std::uint64_t seed) {
  const MatrixXcd G = gaussian_matrix(cols, rows, seed);
  Eigen::HouseholderQR<MatrixXcd> qr(G);
  const MatrixXcd Q = qr.householderQ() * MatrixXcd::Identity(cols, rows);
  return Q.adjoint();
}

VectorXd training_row_powers(const SystemConfig& cfg, const PowerSplit& power) {
  return cfg.alpha * cfg.P0 * cfg.T * power.gamma;
}

void check_spec(const PilotDesignSpec& spec) {
  spec.config.validate();
  spec.fading.validate();
  spec.power.validate(spec.config.alpha);
  if (spec.fading.d.size() != spec.config.K ||
      spec.power.gamma.size() != spec.config.K)
    throw std::invalid_argument("PilotDesignSpec: K mismatch");
}

}  // namespace

PilotMatrix pilot_orthogonal(const PilotDesignSpec& spec, std::uint64_t seed) {
  check_spec(spec);
  const int K = spec.config.K;
  const int aT = spec.config.train_symbols();
  if (K > aT)
    throw std::invalid_argument("pilot_orthogonal: requires K <= alpha*T");
  const VectorXd rx = training_row_powers(spec.config, spec.power);
  MatrixXcd Xp = rx.cwiseSqrt().asDiagonal() * orthonormal_rows(K, aT, seed);
  return PilotMatrix::from_matrix(std::move(Xp));
}

PilotMatrix pilot_lower_bound(const PilotDesignSpec& spec, std::uint64_t seed) {
  check_spec(spec);
  const int K = spec.config.K;
  const int aT = spec.config.train_symbols();
  if (K <= aT) return pilot_orthogonal(spec, seed);

  // Keep the strongest alpha*T users (d is sorted descending); the trailing
  // diagonal of R_X is zeroed, so those rows vanish.
  VectorXd rx = training_row_powers(spec.config, spec.power);
  for (int k = aT; k < K; ++k) rx[k] = 0.0;
  const MatrixXcd U = orthonormal_rows(aT, aT, seed);
  MatrixXcd Xp = MatrixXcd::Zero(K, aT);
  for (int k = 0; k < aT; ++k) Xp.row(k) = std::sqrt(rx[k]) * U.row(k);
  return PilotMatrix::from_matrix(std::move(Xp));
}

PilotMatrix pilot_uniform(const PilotDesignSpec& spec) {
  check_spec(spec);
  if (!spec.fading.is_uniform())
    throw std::invalid_argument("pilot_uniform: fading must be uniform");
  const int K = spec.config.K;
  const int aT = spec.config.train_symbols();
  const double g = spec.power.gamma[0];
  if ((spec.power.gamma.array() - g).abs().maxCoeff() > 1e-12 * std::max(1.0, g))
    throw std::invalid_argument("pilot_uniform: gamma must be uniform");

  const double P0 = spec.config.P0;
  const double T = spec.config.T;
  const double alpha = spec.config.alpha;
  MatrixXcd Xp(K, aT);
  if (K <= aT) {
    // Row-orthogonal slice of the alpha*T-point unitary DFT.
    const double scale = std::sqrt(alpha * g * P0 * T);
    const double w = 2.0 * std::numbers::pi / aT;
    const double norm = 1.0 / std::sqrt(static_cast<double>(aT));
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < aT; ++j)
        Xp(k, j) = scale * norm * std::polar(1.0, -w * k * j);
  } else {
    // Column-orthogonal slice of the K-point unitary DFT.
    const double scale = std::sqrt(g * P0 * K);
    const double w = 2.0 * std::numbers::pi / K;
    const double norm = 1.0 / std::sqrt(static_cast<double>(K));
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < aT; ++j)
        Xp(k, j) = scale * norm * std::polar(1.0, -w * k * j);
  }
  return PilotMatrix::from_matrix(std::move(Xp));
}

PilotMatrix pilot_random(const PilotDesignSpec& spec, std::uint64_t seed) {
  check_spec(spec);
  const int K = spec.config.K;
  const int aT = spec.config.train_symbols();
  const VectorXd rx = training_row_powers(spec.config, spec.power);
  Rng rng(mix_seed(seed, 0xBA5EULL));
  MatrixXcd Xp(K, aT);
  for (int k = 0; k < K; ++k) {
    if (rx[k] <= 0.0) {
      Xp.row(k).setZero();
      continue;
    }
    double n2 = 0.0;
    do {
      for (int j = 0; j < aT; ++j) Xp(k, j) = rng.cnormal();
      n2 = Xp.row(k).squaredNorm();
    } while (n2 == 0.0);
    Xp.row(k) *= std::sqrt(rx[k] / n2);
  }
  return PilotMatrix::from_matrix(std::move(Xp));
}

PilotMatrix pilot_upper_bound(const PilotDesignSpec& spec) {
  check_spec(spec);
  const int K = spec.config.K;
  const int aT = spec.config.train_symbols();
  if (K <= aT)
    throw std::invalid_argument("pilot_upper_bound: requires K > alpha*T");

  const double N0 = spec.config.N0;
  const double P0 = spec.config.P0;
  const VectorXd& d = spec.fading.d;

  std::vector<int> act;
  for (int k = 0; k < K; ++k)
    if (spec.power.gamma[k] > 0.0 && spec.power.gamma_prime[k] > 0.0 && d[k] > 0.0)
      act.push_back(k);
  const int A = static_cast<int>(act.size());
  MatrixXcd Xp = MatrixXcd::Zero(K, aT);
  if (A == 0) return PilotMatrix::from_matrix(std::move(Xp));

  const VectorXd gain_full =
      effective_gain_diagonal(spec.config, d, spec.power);
  VectorXd target(A), scale(A);
  for (int i = 0; i < A; ++i) {
    const int k = act[i];
    target[i] = gain_full[k];
    scale[i] = d[k] * std::sqrt(spec.power.gamma_prime[k] * P0);
  }

  const int zeros = std::max(0, A - aT);
  const RealVec spectrum = min_majorizing_vector(target, zeros);
  const MatrixXcd B = schur_horn(spectrum, target);

  // Whitened Gram on the active block, then unwind Xt = D Xp (...)^{-1/2}.
  const MatrixXcd W = scale.cwiseInverse().asDiagonal() * B *
                      scale.cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(W);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("pilot_upper_bound: eigendecomposition failed");

  VectorXd s = es.eigenvalues().cwiseMax(0.0);
  if (s.maxCoeff() >= 1.0 - 1e-12)
    throw std::domain_error(
        "pilot_upper_bound: relaxed optimum is not realizable by a "
        "finite-power pilot for this spec");

  // Eigen orders ascending; the top min(A, aT) modes carry the signal.
  const int rank = std::min(A, aT);
  MatrixXcd DXp = MatrixXcd::Zero(A, aT);
  for (int j = 0; j < rank; ++j) {
    const double sv = s[A - 1 - j];
    if (sv <= 0.0) continue;
    DXp.col(j) = std::sqrt(N0 * sv / (1.0 - sv)) * es.eigenvectors().col(A - 1 - j);
  }
  for (int i = 0; i < A; ++i) Xp.row(act[i]) = DXp.row(i) / d[act[i]];
  return PilotMatrix::from_matrix(std::move(Xp));
}

std::pair<double, double> upper_bound_condition_residuals(
    const PilotMatrix& pilot, const SystemConfig& cfg,
    const FadingProfile& fading, const PowerSplit& power) {
  const VectorXd& d = fading.d;
  const MatrixXcd Xt = whitened_pilot(pilot.Xp, d, cfg.N0);
  const VectorXd target = effective_gain_diagonal(cfg, d, power);
  const double scale = std::max(1.0, target.maxCoeff());

  // Condition 1: diagonal of Xt Xt^H D^2 R_Xd matches the target diagonal.
  VectorXd rxd(d.size());
  for (Eigen::Index k = 0; k < d.size(); ++k)
    rxd[k] = d[k] * d[k] * power.gamma_prime[k] * cfg.P0;
  const MatrixXcd XtXt = Xt * Xt.adjoint();
  double r1 = 0.0;
  for (Eigen::Index k = 0; k < d.size(); ++k)
    r1 = std::max(r1, std::abs(std::real(XtXt(k, k)) * rxd[k] - target[k]) / scale);

  // Condition 2: nonzero spectrum equals the minimal majorizing vector with
  // K - alpha*T forced zeros. Compare through the Hermitian congruence.
  VectorXd sq = rxd.cwiseSqrt();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sq.asDiagonal() * XtXt *
                                              sq.asDiagonal());
  const int zeros = std::max<int>(0, static_cast<int>(d.size()) -
                                         cfg.train_symbols());
  const RealVec want = min_majorizing_vector(target, zeros);
  double r2 = 0.0;
  for (Eigen::Index k = 0; k < d.size(); ++k)
    r2 = std::max(r2, std::abs(es.eigenvalues()[k] - want[k]) / scale);
  return {r1, r2};
}

}  // namespace mumimo
