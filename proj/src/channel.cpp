#include "mumimo/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mumimo/rng.hpp"

namespace mumimo {

int SystemConfig::train_symbols() const {
  return static_cast<int>(std::lround(alpha * T));
}

void SystemConfig::validate() const {
  if (N < 1 || K < 1 || T < 1)
    throw std::invalid_argument("SystemConfig: N, K, T must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("SystemConfig: alpha must lie in (0,1)");
  const double at = alpha * T;
  if (std::abs(at - std::lround(at)) > 1e-9 * std::max(1.0, at))
    throw std::invalid_argument("SystemConfig: alpha*T must be an integer");
  const int trn = static_cast<int>(std::lround(at));
  if (trn < 1 || trn > T - 1)
    throw std::invalid_argument(
        "SystemConfig: both phases need at least one symbol");
  if (!(P0 > 0.0) || !(N0 > 0.0))
    throw std::invalid_argument("SystemConfig: P0 and N0 must be positive");
}

bool FadingProfile::is_uniform(double rel_tol) const {
  if (d.size() <= 1) return true;
  const double hi = d.maxCoeff();
  const double lo = d.minCoeff();
  return hi - lo <= rel_tol * std::max(1.0, hi);
}

void FadingProfile::validate() const {
  if (d.size() < 1) throw std::invalid_argument("FadingProfile: empty");
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if (!(d[k] >= 0.0) || !std::isfinite(d[k]))
      throw std::invalid_argument("FadingProfile: entries must be finite, >= 0");
    if (k > 0 && d[k] > d[k - 1] + 1e-12 * std::max(1.0, d[k]))
      throw std::invalid_argument("FadingProfile: not sorted descending");
  }
}

PowerSplit PowerSplit::uniform(int K, double g, double gp) {
  PowerSplit p;
  p.gamma = VectorXd::Constant(K, g);
  p.gamma_prime = VectorXd::Constant(K, gp);
  p.active.assign(K, g > 0.0 || gp > 0.0);
  return p;
}

void PowerSplit::validate(double alpha) const {
  const auto K = gamma.size();
  if (gamma_prime.size() != K || static_cast<Eigen::Index>(active.size()) != K)
    throw std::invalid_argument("PowerSplit: inconsistent lengths");
  for (Eigen::Index k = 0; k < K; ++k) {
    if (gamma[k] < 0.0 || gamma_prime[k] < 0.0)
      throw std::invalid_argument("PowerSplit: negative coefficient");
    if (alpha * gamma[k] + (1.0 - alpha) * gamma_prime[k] > 1.0 + 1e-9)
      throw std::invalid_argument("PowerSplit: per-user power budget exceeded");
    if (!active[k] && (gamma[k] != 0.0 || gamma_prime[k] != 0.0))
      throw std::invalid_argument("PowerSplit: inactive user with power");
  }
}

int PowerSplit::active_count(double tol) const {
  int n = 0;
  for (Eigen::Index k = 0; k < gamma.size(); ++k)
    if (active[k] && gamma_prime[k] > tol) ++n;
  return n;
}

PilotMatrix PilotMatrix::from_matrix(MatrixXcd Xp) {
  PilotMatrix p;
  p.row_powers = Xp.rowwise().squaredNorm() / static_cast<double>(Xp.cols());
  p.Xp = std::move(Xp);
  return p;
}

FadingProfile sample_scenario(int K, double radius_m, std::uint64_t seed) {
  if (K < 1) throw std::invalid_argument("sample_scenario: K must be >= 1");
  if (!(radius_m > 0.0))
    throw std::invalid_argument("sample_scenario: radius must be positive");
  Rng rng(mix_seed(seed, 0xD15CULL));
  std::vector<std::pair<double, double>> users(K);  // (d, r)
  for (int k = 0; k < K; ++k) {
    const double r = radius_m * std::sqrt(rng.uniform_pos());
    users[k] = {std::pow(r, -2.0), r};
  }
  std::stable_sort(users.begin(), users.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  FadingProfile f;
  f.d.resize(K);
  f.positions_m.resize(K);
  for (int k = 0; k < K; ++k) {
    f.d[k] = users[k].first;
    f.positions_m[k] = users[k].second;
  }
  return f;
}

MatrixXcd sample_small_scale(int N, int K, std::uint64_t seed) {
  if (N < 1 || K < 1)
    throw std::invalid_argument("sample_small_scale: bad dimensions");
  Rng rng(mix_seed(seed, 0x5CA1EULL));
  MatrixXcd H(N, K);
  for (Eigen::Index j = 0; j < K; ++j)
    for (Eigen::Index i = 0; i < N; ++i) H(i, j) = rng.cnormal();
  return H;
}

namespace {

// Gram of the scaled pilot plus noise floor: Xp^H D^2 Xp + N0 I.
MatrixXcd regularized_gram(const MatrixXcd& Xp, const VectorXd& d, double N0) {
  if (Xp.rows() != d.size())
    throw std::invalid_argument("pilot/fading dimension mismatch");
  if (!(N0 > 0.0)) throw std::invalid_argument("N0 must be positive");
  const MatrixXcd DX = d.asDiagonal() * Xp;
  MatrixXcd A = N0 * MatrixXcd::Identity(Xp.cols(), Xp.cols());
  A.selfadjointView<Eigen::Lower>().rankUpdate(DX.adjoint(), 1.0);
  return MatrixXcd(A.selfadjointView<Eigen::Lower>());
}

}  // namespace

MatrixXcd mmse_estimate(const MatrixXcd& Yp, const MatrixXcd& Xp,
                        const VectorXd& d, double N0) {
  if (Yp.cols() != Xp.cols())
    throw std::invalid_argument("mmse_estimate: observation/pilot mismatch");
  const MatrixXcd A = regularized_gram(Xp, d, N0);
  const MatrixXcd rhs = Xp.adjoint() * d.asDiagonal();  // alphaT x K
  return Yp * A.llt().solve(rhs);
}

MatrixXcd mmse_error_matrix(const MatrixXcd& Xp, const VectorXd& d, double N0) {
  const MatrixXcd A = regularized_gram(Xp, d, N0);
  const MatrixXcd DX = (d.asDiagonal() * Xp).adjoint();  // alphaT x K
  const MatrixXcd M = MatrixXcd::Identity(d.size(), d.size()) -
                      DX.adjoint() * A.llt().solve(DX);
  // Symmetrize away solve roundoff; the result is Hermitian by construction.
  return 0.5 * (M + M.adjoint());
}

MatrixXcd whitened_pilot(const MatrixXcd& Xp, const VectorXd& d, double N0) {
  const MatrixXcd A = regularized_gram(Xp, d, N0);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(A);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("whitened_pilot: eigendecomposition failed");
  // A >= N0 I, so the PSD inverse square root is well conditioned.
  const VectorXd inv_sqrt = es.eigenvalues().cwiseMax(N0 * 1e-12).cwiseSqrt().cwiseInverse();
  return d.asDiagonal() * Xp * es.eigenvectors() * inv_sqrt.asDiagonal() *
         es.eigenvectors().adjoint();
}

NoiseModel equivalent_noise_power(const MatrixXcd& error_matrix,
                                  const VectorXd& d, const PowerSplit& power,
                                  double P0, double N0) {
  if (error_matrix.rows() != d.size() || power.gamma_prime.size() != d.size())
    throw std::invalid_argument("equivalent_noise_power: dimension mismatch");
  double s = N0;
  for (Eigen::Index k = 0; k < d.size(); ++k)
    s += std::real(error_matrix(k, k)) * d[k] * d[k] * power.gamma_prime[k] * P0;
  return NoiseModel{s};
}

double sigma_v2_closed_form(const SystemConfig& cfg, const VectorXd& d,
                            const PowerSplit& power) {
  if (d.size() != power.gamma.size())
    throw std::invalid_argument("sigma_v2_closed_form: dimension mismatch");
  double s = cfg.N0;
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    const double dk2 = d[k] * d[k];
    s += power.gamma_prime[k] * dk2 * cfg.P0 /
         (1.0 + cfg.alpha * power.gamma[k] * cfg.rho0() * dk2 * cfg.T);
  }
  return s;
}

VectorXd effective_gain_diagonal(const SystemConfig& cfg, const VectorXd& d,
                                 const PowerSplit& power) {
  if (d.size() != power.gamma.size())
    throw std::invalid_argument("effective_gain_diagonal: dimension mismatch");
  VectorXd g(d.size());
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    const double dk2 = d[k] * d[k];
    const double train = cfg.alpha * power.gamma[k] * cfg.rho0() * dk2 * cfg.T;
    g[k] = power.gamma_prime[k] * cfg.P0 * dk2 * train / (1.0 + train);
  }
  return g;
}

}  // namespace mumimo
