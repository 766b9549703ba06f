#include <doctest.h>

#include <algorithm>

#include "mumimo/majorization.hpp"
#include "mumimo/rng.hpp"

using namespace mumimo;

namespace {

RealVec vec(std::initializer_list<double> v) {
  RealVec r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r[i++] = x;
  return r;
}

}  // namespace

TEST_SUITE("majorization") {

TEST_CASE("majorizes basic directions") {
  CHECK(majorizes(vec({2, 0}), vec({1, 1})));
  CHECK_FALSE(majorizes(vec({1, 1}), vec({2, 0})));
  CHECK(majorizes(vec({3, 1, 4}), vec({3, 1, 4})));
  CHECK_THROWS_AS(majorizes(vec({1, 2}), vec({1, 2, 3})), std::invalid_argument);
}

TEST_CASE("minimal majorizing vector worked cases") {
  const RealVec a = min_majorizing_vector(vec({1, 1, 1, 1}), 2);
  CHECK(a.isApprox(vec({0, 0, 2, 2}), 1e-14));
  const RealVec b = min_majorizing_vector(vec({1, 2, 10, 20}), 1);
  CHECK(b.isApprox(vec({0, 3, 10, 20}), 1e-14));
  const RealVec c = min_majorizing_vector(vec({5, 7}), 0);
  CHECK(c.isApprox(vec({5, 7}), 1e-14));
}

TEST_CASE("minimal majorizing vector domain errors") {
  CHECK_THROWS_AS(min_majorizing_vector(vec({1, 2}), 3), std::domain_error);
  CHECK_THROWS_AS(min_majorizing_vector(vec({1, -2}), 0), std::domain_error);
  CHECK_THROWS_AS(min_majorizing_vector(vec({1, 2}), 2), std::domain_error);
  CHECK(min_majorizing_vector(vec({0, 0}), 2).isZero());
}

TEST_CASE("minimal majorizing vector properties on random input") {
  Rng rng(7);
  for (int rep = 0; rep < 400; ++rep) {
    const int n = 1 + static_cast<int>(rng.uniform() * 6.0);
    RealVec y(n);
    for (int i = 0; i < n; ++i)
      y[i] = rng.uniform() < 0.1 ? 0.0 : 3.0 * rng.uniform_pos();
    for (int m = 0; m < n; ++m) {
      const RealVec x = min_majorizing_vector(y, m);
      CHECK(majorizes(x, y));
      CHECK(std::abs(x.sum() - y.sum()) <= 1e-12 * std::max(1.0, y.sum()));
      CHECK(std::is_sorted(x.data(), x.data() + n));
    }
  }
}

TEST_CASE("spectrum synthesis hits diagonal and eigenvalues") {
  const Eigen::MatrixXcd A = schur_horn(vec({2, 0}), vec({1, 1}));
  CHECK(std::abs(std::real(A(0, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(std::real(A(1, 1)) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(A(0, 1)) - 1.0) < 1e-10);

  const Eigen::MatrixXcd B = schur_horn(vec({3, 1}), vec({3, 1}));
  CHECK(B.isApprox(Eigen::Vector2cd(3, 1).asDiagonal().toDenseMatrix(), 1e-12));

  const Eigen::MatrixXcd C = schur_horn(vec({3, 1, 0}), vec({2, 1, 1}));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(C);
  CHECK(es.eigenvalues().isApprox(vec({0, 1, 3}), 1e-9));
  CHECK(std::abs(std::real(C(0, 0)) - 2.0) < 1e-10);
}

TEST_CASE("spectrum synthesis precondition") {
  CHECK_THROWS_AS(schur_horn(vec({1, 1}), vec({2, 0})), std::domain_error);
}

}  // TEST_SUITE
