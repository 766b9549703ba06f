#include "mumimo/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mumimo {

namespace {

// Increasing rearrangement with ties broken by original index (stable).
std::vector<double> sorted_increasing(const RealVec& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::stable_sort(s.begin(), s.end());
  return s;
}

}  // namespace

bool majorizes(const RealVec& x, const RealVec& y, double tol) {
  if (x.size() != y.size())
    throw std::invalid_argument("majorizes: length mismatch");
  const auto n = x.size();
  if (n == 0) return true;

  const std::vector<double> xs = sorted_increasing(x);
  const std::vector<double> ys = sorted_increasing(y);
  const double scale = std::max(1.0, y.cwiseAbs().sum());
  const double eps = tol * scale;

  double px = 0.0, py = 0.0;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    px += xs[static_cast<std::size_t>(k)];
    py += ys[static_cast<std::size_t>(k)];
    if (px > py + eps) return false;
  }
  px += xs[static_cast<std::size_t>(n - 1)];
  py += ys[static_cast<std::size_t>(n - 1)];
  return std::abs(px - py) <= eps;
}

RealVec min_majorizing_vector(const RealVec& y, int zeros) {
  const int n = static_cast<int>(y.size());
  if (zeros < 0 || zeros > n)
    throw std::domain_error("min_majorizing_vector: zero count out of range");
  if ((y.array() < 0.0).any())
    throw std::domain_error("min_majorizing_vector: negative entry");

  const std::vector<double> ys = sorted_increasing(y);
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + ys[i];

  const double total = prefix[n];
  if (zeros == n) {
    if (total > kMajorizationTol * std::max(1.0, total))
      throw std::domain_error(
          "min_majorizing_vector: no all-zero vector majorizes a positive sum");
    return RealVec::Zero(n);
  }

  // k is the smallest index with prefix(k) <= (k - zeros) * y_[k+1]; the
  // whole vector is the fallback member of the index set.
  int k = n;
  for (int j = zeros; j < n; ++j) {
    if (prefix[j] <= (j - zeros) * ys[j]) {  // ys[j] is the (j+1)-th smallest
      k = j;
      break;
    }
  }

  RealVec x = RealVec::Zero(n);
  if (k > zeros) {
    const double avg = prefix[k] / (k - zeros);
    for (int i = zeros; i < k; ++i) x[i] = avg;
  }
  for (int i = k; i < n; ++i) x[i] = ys[i];
  return x;
}

Eigen::MatrixXcd schur_horn(const RealVec& eigs, const RealVec& diag) {
  if (eigs.size() != diag.size())
    throw std::invalid_argument("schur_horn: length mismatch");
  if (!majorizes(eigs, diag))
    throw std::domain_error("schur_horn: spectrum does not majorize diagonal");

  const int n = static_cast<int>(eigs.size());
  // Process target diagonal entries in descending order; perm maps working
  // position -> caller position so the output diagonal lands in input order.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int a, int b) { return diag[a] > diag[b]; });

  Eigen::MatrixXd work = Eigen::MatrixXd::Zero(n, n);
  {
    std::vector<double> lam(eigs.data(), eigs.data() + n);
    std::sort(lam.begin(), lam.end(), std::greater<double>());
    for (int i = 0; i < n; ++i) work(i, i) = lam[i];
  }

  // Invariant: after fixing positions 0..p-1 the trailing block work[p:,p:]
  // is diagonal and its entries are the remaining eigenvalues.
  for (int p = 0; p + 1 < n; ++p) {
    const double target = diag[perm[p]];
    // Closest remaining eigenvalue above and below the target.
    int hi = -1, lo = -1;
    for (int q = p; q < n; ++q) {
      const double v = work(q, q);
      if (v >= target && (hi < 0 || v < work(hi, hi))) hi = q;
      if (v <= target && (lo < 0 || v > work(lo, lo))) lo = q;
    }
    // Majorization guarantees both exist up to rounding; fall back to the
    // nearest entry when one side is empty by a few ulps.
    if (hi < 0) hi = lo;
    if (lo < 0) lo = hi;

    if (hi == lo) {
      work.row(hi).swap(work.row(p));
      work.col(hi).swap(work.col(p));
      work(p, p) = target;
      continue;
    }

    const double a = work(hi, hi);
    const double g = work(lo, lo);
    double c2 = (a == g) ? 1.0 : (target - g) / (a - g);
    c2 = std::clamp(c2, 0.0, 1.0);
    const double c = std::sqrt(c2);
    const double s = std::sqrt(1.0 - c2);

    // Rotate rows/cols (hi, lo) so position hi takes the target value. Only
    // off-diagonal couplings with already fixed rows change besides the pair.
    Eigen::VectorXd rhi = work.row(hi);
    Eigen::VectorXd rlo = work.row(lo);
    work.row(hi) = (c * rhi + s * rlo).transpose();
    work.row(lo) = (-s * rhi + c * rlo).transpose();
    Eigen::VectorXd chi = work.col(hi);
    Eigen::VectorXd clo = work.col(lo);
    work.col(hi) = c * chi + s * clo;
    work.col(lo) = -s * chi + c * clo;
    // Pair block entries in exact arithmetic; overwrite to kill roundoff.
    work(hi, hi) = target;
    work(lo, lo) = a + g - target;
    work(hi, lo) = work(lo, hi) = c * s * (g - a);

    work.row(hi).swap(work.row(p));
    work.col(hi).swap(work.col(p));
  }

  Eigen::MatrixXcd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(perm[i], perm[j]) = work(i, j);
  return out;
}

}  // namespace mumimo
