#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "mumimo/harness.hpp"

using namespace mumimo;

namespace {

ExperimentSpec tiny_spec() {
  ExperimentSpec s;
  s.name = "tiny";
  s.variable = SweepVariable::K;
  s.values = {2, 3};
  s.base.N = 6;
  s.base.K = 3;
  s.base.T = 10;
  s.base.alpha = 0.5;
  s.base.P0 = 1.0;
  s.base.N0 = 1e-3;
  s.fading.uniform = false;
  s.fading.radius_m = 100.0;
  s.fading.drop_seed = 5;
  s.designs = {DesignKind::lower, DesignKind::random_pilot};
  s.trials = 60;
  s.seed = 3;
  s.scan_trials = 40;
  s.alphaT_grid = {3, 5};
  s.solver_draws = 8;
  s.solver_t_grid = 6;
  s.solver_max_iterations = 120;
  s.solver_pg_tol = 1e-3;
  return s;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("spec validation lists offending fields") {
  ExperimentSpec s = tiny_spec();
  s.values = {};
  s.designs.clear();
  try {
    s.validate();
    FAIL("expected validation error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("values") != std::string::npos);
    CHECK(msg.find("designs") != std::string::npos);
  }
  ExperimentSpec u = tiny_spec();
  u.designs = {DesignKind::uniform_exact};
  CHECK_THROWS_AS(u.validate(), std::invalid_argument);
}

TEST_CASE("csv round trip and shape") {
  std::vector<SweepRow> rows(1);
  rows[0].swept = 10.0;
  DesignResult d;
  d.design = DesignKind::lower;
  d.rate = 12.345678901234567;
  d.ci = 0.25;
  d.alpha_opt = 0.3;
  d.active_users = 7;
  rows[0].designs = {d};
  const std::string csv = rows_to_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.rfind("swept,design,rate,ci,alpha_opt,active_users\n", 0) == 0);
  const auto back = rows_from_csv(csv);
  REQUIRE(back.size() == 1);
  REQUIRE(back[0].designs.size() == 1);
  CHECK(back[0].swept == rows[0].swept);
  CHECK(back[0].designs[0].rate == d.rate);
  CHECK(back[0].designs[0].ci == d.ci);
  CHECK(back[0].designs[0].active_users == 7);
  CHECK(rows_to_csv(back) == csv);

  const auto jback = rows_from_json(rows_to_json(rows));
  CHECK(rows_to_csv(jback) == csv);
}

TEST_CASE("experiment run is deterministic across worker counts") {
  const ExperimentSpec s = tiny_spec();
  setenv("MUMIMO_WORKERS", "1", 1);
  const auto a = run_experiment(s);
  setenv("MUMIMO_WORKERS", "3", 1);
  const auto b = run_experiment(s);
  unsetenv("MUMIMO_WORKERS");
  CHECK(rows_to_csv(a) == rows_to_csv(b));
  for (const auto& row : a)
    for (const auto& d : row.designs) {
      CHECK(d.error.empty());
      CHECK(d.rate >= 0.0);
      CHECK(d.ci.has_value());
    }
}

TEST_CASE("spec json parsing and dB conversion") {
  const std::string text = R"({
    "name": "demo",
    "sweep": {"variable": "rho0_db", "values": [10, 20]},
    "config": {"N": 6, "K": 2, "T": 10, "alpha": 0.5, "P0": 2.0, "rho0_db": 30},
    "fading": {"mode": "uniform", "d": 1.5},
    "designs": ["lower", "uniform_exact"],
    "trials": 50,
    "seed": 9,
    "search": {"alphaT_grid": [5], "scan_trials": 30, "solver_draws": 8,
               "solver_t_grid": 6}
  })";
  const ExperimentSpec s = spec_from_json_text(text);
  CHECK(s.base.N0 == doctest::Approx(2.0 / 1000.0));
  CHECK(s.fading.uniform);
  CHECK(s.designs.size() == 2);
  const auto rows = run_experiment(s);
  CHECK(rows.size() == 2);
  // Higher SNR never hurts the optimized design.
  CHECK(rows[1].designs[0].rate >= rows[0].designs[0].rate - 1e-6);
}

TEST_CASE("pilot json round trip") {
  MatrixXcd X(2, 3);
  X << std::complex<double>(1, -2), std::complex<double>(0, 1),
      std::complex<double>(0.5, 0), std::complex<double>(-1, 0.25),
      std::complex<double>(2, 2), std::complex<double>(0, 0);
  const PilotMatrix pm = PilotMatrix::from_matrix(X);
  const PilotMatrix back = pilot_from_json_text(pilot_to_json_text(pm));
  CHECK(back.Xp == pm.Xp);
  CHECK(back.row_powers == pm.row_powers);
}

TEST_CASE("cli: optimal-k table, missing sweep file, bad subcommand") {
  {
    std::vector<const char*> argv = {"mumimo", "optimal-k", "--alpha", "0.5",
                                     "--T", "200", "--rho0d2", "1"};
    CHECK(cli_main(static_cast<int>(argv.size()),
                   const_cast<char**>(argv.data())) == 0);
  }
  {
    std::vector<const char*> argv = {"mumimo", "sweep", "/nonexistent.json"};
    CHECK(cli_main(static_cast<int>(argv.size()),
                   const_cast<char**>(argv.data())) == 1);
  }
  {
    std::vector<const char*> argv = {"mumimo", "frobnicate"};
    CHECK(cli_main(static_cast<int>(argv.size()),
                   const_cast<char**>(argv.data())) == 1);
  }
}

TEST_CASE("cli: pilot emission writes parseable json") {
  const std::string path = "/tmp/mumimo_pilot_test.json";
  std::vector<const char*> argv = {"mumimo", "pilot",    "--kind", "uniform",
                                   "--K",    "4",        "--T",    "8",
                                   "--alphaT", "2",      "--d",    "1.0",
                                   "--out",  path.c_str()};
  REQUIRE(cli_main(static_cast<int>(argv.size()),
                   const_cast<char**>(argv.data())) == 0);
  std::ifstream f(path);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  const PilotMatrix pm = pilot_from_json_text(ss.str());
  CHECK(pm.Xp.rows() == 4);
  CHECK(pm.Xp.cols() == 2);
  std::remove(path.c_str());
}

}  // TEST_SUITE
