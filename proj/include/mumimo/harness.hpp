#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mumimo/optimizer.hpp"

namespace mumimo {

enum class SweepVariable { K, rho0_db, N, alpha };
enum class DesignKind { upper, lower, uniform_exact, random_pilot };

std::string to_string(SweepVariable v);
std::string to_string(DesignKind d);

// Scenario fading (disk drop) or uniform fading with a fixed coefficient.
struct FadingMode {
  bool uniform = false;
  double radius_m = 100.0;  // scenario
  std::uint64_t drop_seed = 1;
  double d = 1.0;  // uniform
};

struct ExperimentSpec {
  std::string name;
  SweepVariable variable = SweepVariable::K;
  std::vector<double> values;  // nonempty, strictly increasing
  SystemConfig base;           // fields not swept
  FadingMode fading;
  std::vector<DesignKind> designs;
  long trials = 500;
  std::uint64_t seed = 1;
  std::string out;  // output stem; empty = no files

  // Search/solver profile.
  std::vector<int> alphaT_grid;  // empty: default grid
  int alpha_grid_points = 19;
  long scan_trials = 192;
  int solver_draws = 16;
  int solver_t_grid = 12;
  double solver_t_refine_tol = 3e-3;
  int solver_max_iterations = 600;
  double solver_pg_tol = 1e-5;

  void validate() const;  // throws std::invalid_argument listing bad fields
};

struct DesignResult {
  DesignKind design = DesignKind::lower;
  double rate = 0.0;
  std::optional<double> ci;
  double alpha_opt = 0.0;
  int active_users = 0;
  std::string error;  // nonempty when the pipeline failed for this row
};

struct SweepRow {
  double swept = 0.0;
  std::vector<DesignResult> designs;
};

// Runs every requested design per swept value. Deterministic for a fixed
// (spec, seed) regardless of worker count; per-row failures are recorded and
// the run continues. Writes <out>.csv and <out>.json when out is nonempty.
std::vector<SweepRow> run_experiment(const ExperimentSpec& spec);

// CSV: header `swept,design,rate,ci,alpha_opt,active_users`, one line per
// (row, design), 17 significant digits, LF endings. JSON mirrors the rows.
std::string rows_to_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> rows_from_csv(const std::string& csv);
std::string rows_to_json(const std::vector<SweepRow>& rows);
std::vector<SweepRow> rows_from_json(const std::string& json_text);
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);
void emit_json(const std::vector<SweepRow>& rows, const std::string& path);

ExperimentSpec spec_from_json_text(const std::string& text);
ExperimentSpec spec_from_file(const std::string& path);

// Pilot matrices persist as row-major interleaved re/im pairs.
std::string pilot_to_json_text(const PilotMatrix& pilot);
PilotMatrix pilot_from_json_text(const std::string& text);

// CLI front end: subcommands sweep, optimal-k, pilot, asymptotic-check,
// selftest. Exit 0 on success, 1 on validation/usage error, 2 on numeric
// failure.
int cli_main(int argc, char** argv);

}  // namespace mumimo
