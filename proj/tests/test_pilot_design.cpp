#include <doctest.h>

#include <cmath>

#include "mumimo/pilot_design.hpp"
#include "mumimo/rng.hpp"

using namespace mumimo;

namespace {

PilotDesignSpec base_spec(int K, int T, double alpha, double gamma) {
  SystemConfig cfg;
  cfg.N = 4;
  cfg.K = K;
  cfg.T = T;
  cfg.alpha = alpha;
  cfg.P0 = 1.0;
  cfg.N0 = 1.0;
  FadingProfile f;
  f.d = VectorXd::LinSpaced(K, 1.4, 0.6);
  const double gp = (1.0 - alpha * gamma) / (1.0 - alpha);
  return {PilotKind::orthogonal, cfg, f, PowerSplit::uniform(K, gamma, gp)};
}

}  // namespace

TEST_SUITE("pilot_design") {

TEST_CASE("orthogonal pilot Gram equals the training power matrix") {
  PilotDesignSpec spec = base_spec(2, 4, 0.5, 1.0);
  const PilotMatrix pm = pilot_orthogonal(spec);
  MatrixXcd want = MatrixXcd::Zero(2, 2);
  want(0, 0) = want(1, 1) = 2.0;  // alpha*gamma*P0*T
  CHECK((pm.Xp * pm.Xp.adjoint()).isApprox(want, 1e-10));
  CHECK(pm.row_powers[0] == doctest::Approx(1.0));  // gamma_k * P0

  spec.config.K = 5;
  spec.fading.d = VectorXd::Ones(5);
  spec.power = PowerSplit::uniform(5, 1.0, 1.0);
  CHECK_THROWS_AS(pilot_orthogonal(spec), std::invalid_argument);
}

TEST_CASE("single-user pilot meets its exact power") {
  PilotDesignSpec spec = base_spec(1, 8, 0.25, 0.8);
  const PilotMatrix pm = pilot_orthogonal(spec);
  CHECK(pm.Xp.row(0).squaredNorm() ==
        doctest::Approx(0.25 * 0.8 * 8.0).epsilon(1e-12));
}

TEST_CASE("achievable pilot zeroes the weakest rows") {
  PilotDesignSpec spec = base_spec(3, 4, 0.5, 1.0);
  spec.power.gamma << 2.0, 1.0, 0.5;
  for (int k = 0; k < 3; ++k)
    spec.power.gamma_prime[k] =
        (1.0 - 0.5 * spec.power.gamma[k]) / 0.5;
  const PilotMatrix pm = pilot_lower_bound(spec);
  const MatrixXcd gram = pm.Xp * pm.Xp.adjoint();
  CHECK(std::real(gram(0, 0)) == doctest::Approx(4.0));
  CHECK(std::real(gram(1, 1)) == doctest::Approx(2.0));
  CHECK(pm.Xp.row(2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(gram(0, 1)) < 1e-10);

  // Branch identity for K <= alpha*T.
  PilotDesignSpec wide = base_spec(2, 8, 0.5, 1.0);
  const PilotMatrix a = pilot_lower_bound(wide, 5);
  const PilotMatrix b = pilot_orthogonal(wide, 5);
  CHECK(a.Xp.isApprox(b.Xp, 1e-14));
}

TEST_CASE("uniform pilot worked example") {
  // K=4, alpha*T=2, gamma*P0=1, T=8.
  PilotDesignSpec spec = base_spec(4, 8, 0.25, 1.0);
  spec.fading.d = VectorXd::Ones(4);
  const PilotMatrix pm = pilot_uniform(spec);
  const MatrixXcd colg = pm.Xp.adjoint() * pm.Xp;
  CHECK(colg.isApprox(4.0 * MatrixXcd::Identity(2, 2), 1e-10));
  for (int k = 0; k < 4; ++k)
    CHECK(pm.Xp.row(k).squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));

  // Square case satisfies the row condition too.
  PilotDesignSpec sq = base_spec(2, 8, 0.25, 1.0);
  sq.fading.d = VectorXd::Ones(2);
  const PilotMatrix qs = pilot_uniform(sq);
  CHECK((qs.Xp * qs.Xp.adjoint())
            .isApprox(2.0 * MatrixXcd::Identity(2, 2), 1e-10));

  PilotDesignSpec bad = base_spec(2, 8, 0.25, 1.0);  // non-uniform d
  CHECK_THROWS_AS(pilot_uniform(bad), std::invalid_argument);
}

TEST_CASE("random pilot row powers and reproducibility") {
  PilotDesignSpec spec = base_spec(3, 8, 0.5, 0.7);
  const PilotMatrix a = pilot_random(spec, 9);
  const PilotMatrix b = pilot_random(spec, 9);
  CHECK(a.Xp == b.Xp);
  for (int k = 0; k < 3; ++k)
    CHECK(a.Xp.row(k).squaredNorm() ==
          doctest::Approx(0.5 * 0.7 * 8.0).epsilon(1e-12));
  const MatrixXcd gram = a.Xp * a.Xp.adjoint();
  CHECK(std::abs(gram(0, 1)) > 1e-6);  // generically non-orthogonal
}

TEST_CASE("relaxed-optimum pilot satisfies both conditions") {
  // Uniform case: target diagonal is constant, minimal vector averages.
  PilotDesignSpec spec = base_spec(4, 8, 0.25, 0.5);
  spec.fading.d = VectorXd::Ones(4);
  spec.power = PowerSplit::uniform(4, 0.5, (1.0 - 0.25 * 0.5) / 0.75);
  const PilotMatrix pm = pilot_upper_bound(spec);
  const auto [r1, r2] =
      upper_bound_condition_residuals(pm, spec.config, spec.fading, spec.power);
  CHECK(r1 < 1e-8);
  CHECK(r2 < 1e-8);

  // A disconnected user gets an all-zero row and the block still passes.
  PilotDesignSpec dz = base_spec(3, 4, 0.5, 0.4);
  dz.fading.d << 1.0, 1.0, 0.0;
  const PilotMatrix pz = pilot_upper_bound(dz);
  CHECK(pz.Xp.row(2).cwiseAbs().maxCoeff() == 0.0);
  const auto [z1, z2] =
      upper_bound_condition_residuals(pz, dz.config, dz.fading, dz.power);
  CHECK(z1 < 1e-8);
  CHECK(z2 < 1e-8);
}

TEST_CASE("relaxed optimum rejects unrealizable power") {
  // Blowing up the SNR pushes a whitened singular value to 1.
  PilotDesignSpec spec = base_spec(4, 8, 0.25, 0.5);
  spec.fading.d = VectorXd::Ones(4);
  spec.config.N0 = 1e-9;
  spec.power = PowerSplit::uniform(4, 0.5, (1.0 - 0.25 * 0.5) / 0.75);
  CHECK_THROWS_AS(pilot_upper_bound(spec), std::domain_error);
}

TEST_CASE("relaxed pilot never has a worse equivalent noise power") {
  Rng rng(23);
  for (int rep = 0; rep < 40; ++rep) {
    const int T = 8;
    const int aT = 4;
    const int K = 5 + static_cast<int>(rng.uniform() * 3.0);
    SystemConfig cfg;
    cfg.N = 4;
    cfg.K = K;
    cfg.T = T;
    cfg.alpha = 0.5;
    cfg.P0 = 1.0;
    cfg.N0 = 1.0;
    FadingProfile f;
    f.d.resize(K);
    for (int k = 0; k < K; ++k) f.d[k] = 0.4 + 0.6 * rng.uniform();
    std::sort(f.d.data(), f.d.data() + K, std::greater<double>());
    const double g = 0.05 + 0.1 * rng.uniform();
    PowerSplit pw =
        PowerSplit::uniform(K, g, (1.0 - cfg.alpha * g) / (1.0 - cfg.alpha));
    PilotDesignSpec spec{PilotKind::upper_bound, cfg, f, pw};

    auto sigma_of = [&](const PilotMatrix& pm) {
      const MatrixXcd M = mmse_error_matrix(pm.Xp, f.d, cfg.N0);
      return equivalent_noise_power(M, f.d, pw, cfg.P0, cfg.N0).sigma_v2;
    };
    const double s_up = sigma_of(pilot_upper_bound(spec));
    const double s_lo = sigma_of(pilot_lower_bound(spec, mix_seed(1, rep)));
    const double s_rn = sigma_of(pilot_random(spec, mix_seed(2, rep)));
    CHECK(s_up <= s_lo * (1.0 + 1e-9));
    CHECK(s_up <= s_rn * (1.0 + 1e-9));
  }
}

}  // TEST_SUITE
