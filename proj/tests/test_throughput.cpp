#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mumimo/pilot_design.hpp"
#include "mumimo/rng.hpp"
#include "mumimo/throughput.hpp"

using namespace mumimo;

TEST_SUITE("throughput") {

TEST_CASE("zero gains and huge noise give zero rate") {
  SystemConfig cfg{8, 4, 10, 0.5, 1.0, 1.0};
  EffectiveGains g{VectorXd::Zero(4), 1.0};
  const auto r = mc_throughput(cfg, g, 4, 100, 1);
  CHECK(r.rate_bits_per_symbol == 0.0);
  CHECK(*r.ci_halfwidth == 0.0);

  EffectiveGains g2{VectorXd::Ones(4), 1e18};
  const auto r2 = mc_throughput(cfg, g2, 4, 200, 1);
  CHECK(r2.rate_bits_per_symbol < 1e-9);
}

TEST_CASE("mc reduction is worker-count independent") {
  SystemConfig cfg{8, 4, 10, 0.5, 1.0, 1.0};
  EffectiveGains g{VectorXd::LinSpaced(4, 3.0, 0.5), 0.7};
  setenv("MUMIMO_WORKERS", "1", 1);
  const auto a = mc_throughput(cfg, g, 4, 333, 9);
  setenv("MUMIMO_WORKERS", "4", 1);
  const auto b = mc_throughput(cfg, g, 4, 333, 9);
  unsetenv("MUMIMO_WORKERS");
  CHECK(a.rate_bits_per_symbol == b.rate_bits_per_symbol);
  CHECK(*a.ci_halfwidth == *b.ci_halfwidth);
}

TEST_CASE("rate responds monotonically to gains and noise") {
  SystemConfig cfg{8, 3, 10, 0.5, 1.0, 1.0};
  EffectiveGains g{VectorXd::Constant(3, 2.0), 1.0};
  const double base = mc_throughput(cfg, g, 3, 400, 4).rate_bits_per_symbol;
  EffectiveGains more{VectorXd::Constant(3, 2.5), 1.0};
  CHECK(mc_throughput(cfg, more, 3, 400, 4).rate_bits_per_symbol > base);
  EffectiveGains noisier{VectorXd::Constant(3, 2.0), 1.4};
  CHECK(mc_throughput(cfg, noisier, 3, 400, 4).rate_bits_per_symbol < base);
}

TEST_CASE("spectral density values and edges") {
  CHECK(mp_density(1.0, 1.0, 0.4, 0.5) ==
        doctest::Approx(std::sqrt(3.0) / (2.0 * std::numbers::pi)).epsilon(1e-9));
  const MPSupport s = mp_support(0.25, 0.4, 0.5);
  CHECK(s.a == doctest::Approx(0.25));
  CHECK(s.b == doctest::Approx(2.25));
  CHECK(s.regime == MPSupport::Regime::omega_le_alpha);
  const MPSupport sp = mp_support(1.0, 0.8, 0.4);  // omega > alpha
  CHECK(sp.a == doctest::Approx(std::pow(1.0 - std::sqrt(0.5), 2)));
  CHECK(sp.regime == MPSupport::Regime::omega_gt_alpha);
  CHECK(mp_density(5.0, 1.0, 0.4, 0.5) == 0.0);
  CHECK_THROWS_AS(mp_density(0.0, 1.0, 0.4, 0.5), std::domain_error);
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  double s0 = 0.0, s2 = 0.0, s14 = 0.0;
  for (int i = 0; i < 8; ++i) {
    s0 += w[i];
    s2 += w[i] * x[i] * x[i];
    s14 += w[i] * std::pow(x[i], 14);
  }
  CHECK(s0 == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(s2 == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(s14 == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("asymptotic rate: zero data power and linear scaling in N") {
  SystemConfig cfg{100, 100, 200, 0.5, 1.0, 1.0};
  CHECK(asymptotic_throughput(cfg, 1.0, 1.0, 0.0, 100).rate_bits_per_symbol ==
        0.0);

  // With beta, omega, alpha and the spectral coefficient tau*N all pinned,
  // the formula is exactly linear in N. Holding tau*N means retuning the
  // noise level when N changes.
  const double coef = 5.0;
  auto rate_per_n = [&](int N) {
    SystemConfig c;
    c.N = N;
    c.K = N;
    c.T = 2 * N;
    c.alpha = 0.5;
    c.P0 = 1.0;
    double lo = 1e-9, hi = 1e9;
    for (int it = 0; it < 200; ++it) {
      const double mid = std::sqrt(lo * hi);
      c.N0 = 1.0 / mid;  // rho0 = mid
      (tau_effective(c, 1.0, 1.0, 1.0, c.K) * N < coef ? lo : hi) = mid;
    }
    c.N0 = 1.0 / std::sqrt(lo * hi);
    return asymptotic_throughput(c, 1.0, 1.0, 1.0, c.K).rate_bits_per_symbol /
           N;
  };
  CHECK(rate_per_n(50) == doctest::Approx(rate_per_n(100)).epsilon(1e-9));
}

TEST_CASE("evaluate_design is unitarily invariant and consistent") {
  SystemConfig cfg{8, 3, 8, 0.5, 1.0, 0.3};
  FadingProfile f;
  f.d.resize(3);
  f.d << 1.2, 0.9, 0.6;
  PowerSplit pw = PowerSplit::uniform(3, 0.8, 1.2);
  PilotDesignSpec spec{PilotKind::orthogonal, cfg, f, pw};
  const PilotMatrix pm = pilot_orthogonal(spec, 21);

  const auto a = evaluate_design(cfg, f, pm, pw, 300, 55);

  // Right-rotating the pilot leaves the rate untouched (same seed).
  Rng rng(77);
  MatrixXcd Z(4, 4);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) Z(i, j) = rng.cnormal();
  Eigen::HouseholderQR<MatrixXcd> qr(Z);
  const MatrixXcd V = qr.householderQ();
  PilotMatrix rotated = PilotMatrix::from_matrix(pm.Xp * V);
  const auto b = evaluate_design(cfg, f, rotated, pw, 300, 55);
  CHECK(a.rate_bits_per_symbol ==
        doctest::Approx(b.rate_bits_per_symbol).epsilon(1e-9));

  // Orthogonal pilots reproduce the closed-form gain path exactly.
  const EffectiveGains g = effective_gains(cfg, f, pw);
  const auto c = mc_throughput(cfg, g, 3, 300, 55);
  CHECK(a.rate_bits_per_symbol ==
        doctest::Approx(c.rate_bits_per_symbol).epsilon(1e-9));

  // A zero pilot with data power still flowing loses throughput.
  PilotMatrix zero = PilotMatrix::from_matrix(MatrixXcd::Zero(3, 4));
  const auto z = evaluate_design(cfg, f, zero, pw, 300, 55);
  CHECK(z.rate_bits_per_symbol < a.rate_bits_per_symbol);
}

TEST_CASE("optimized pilots beat random pilots in noise power and rate") {
  Rng rng(61);
  int wins = 0;
  const int reps = 25;
  for (int rep = 0; rep < reps; ++rep) {
    SystemConfig cfg{10, 6, 8, 0.5, 1.0, 1e-4};
    FadingProfile f;
    f.d.resize(6);
    for (int k = 0; k < 6; ++k) f.d[k] = 0.3 + rng.uniform();
    std::sort(f.d.data(), f.d.data() + 6, std::greater<double>());
    PowerSplit pw = PowerSplit::uniform(6, 1.0, 1.0);
    PilotDesignSpec spec{PilotKind::lower_bound, cfg, f, pw};
    const std::uint64_t seed = mix_seed(1000, rep);
    const auto lo = evaluate_design(cfg, f, pilot_lower_bound(spec, rep), pw,
                                    400, seed);
    const auto rn =
        evaluate_design(cfg, f, pilot_random(spec, rep), pw, 400, seed);
    if (lo.rate_bits_per_symbol > rn.rate_bits_per_symbol) ++wins;
  }
  CHECK(wins >= reps - 2);
}

TEST_CASE("report shape invariants") {
  SystemConfig cfg{4, 2, 8, 0.5, 1.0, 1.0};
  EffectiveGains g{VectorXd::Ones(2), 1.0};
  const auto mc = mc_throughput(cfg, g, 2, 10, 3);
  CHECK(mc.method == RateMethod::monte_carlo);
  CHECK(mc.ci_halfwidth.has_value());
  const auto as = asymptotic_throughput(cfg, 1.0, 0.5, 1.5, 2);
  CHECK(as.method == RateMethod::asymptotic);
  CHECK_FALSE(as.ci_halfwidth.has_value());
  CHECK_THROWS_AS(mc_throughput(cfg, g, 3, 10, 3), std::invalid_argument);
  CHECK_THROWS_AS(mc_throughput(cfg, g, 2, 0, 3), std::invalid_argument);
}

}  // TEST_SUITE
