#include "mumimo/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mumimo/parallel.hpp"
#include "mumimo/rng.hpp"

namespace mumimo {

using nlohmann::json;

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::K: return "K";
    case SweepVariable::rho0_db: return "rho0_db";
    case SweepVariable::N: return "N";
    case SweepVariable::alpha: return "alpha";
  }
  return "?";
}

std::string to_string(DesignKind d) {
  switch (d) {
    case DesignKind::upper: return "upper";
    case DesignKind::lower: return "lower";
    case DesignKind::uniform_exact: return "uniform_exact";
    case DesignKind::random_pilot: return "random_pilot";
  }
  return "?";
}

namespace {

SweepVariable sweep_from_string(const std::string& s) {
  if (s == "K") return SweepVariable::K;
  if (s == "rho0_db") return SweepVariable::rho0_db;
  if (s == "N") return SweepVariable::N;
  if (s == "alpha") return SweepVariable::alpha;
  throw std::invalid_argument("unknown sweep variable: " + s);
}

DesignKind design_from_string(const std::string& s) {
  if (s == "upper") return DesignKind::upper;
  if (s == "lower") return DesignKind::lower;
  if (s == "uniform_exact") return DesignKind::uniform_exact;
  if (s == "random_pilot") return DesignKind::random_pilot;
  throw std::invalid_argument("unknown design: " + s);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ExperimentSpec::validate() const {
  std::vector<std::string> bad;
  if (values.empty()) bad.push_back("sweep.values (empty)");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] <= values[i - 1]) {
      bad.push_back("sweep.values (not strictly increasing)");
      break;
    }
  if (designs.empty()) bad.push_back("designs (empty)");
  for (DesignKind d : designs)
    if (d == DesignKind::uniform_exact && !fading.uniform)
      bad.push_back("designs (uniform_exact needs uniform fading)");
  if (trials < 1) bad.push_back("trials (< 1)");
  if (scan_trials < 1) bad.push_back("scan_trials (< 1)");
  try {
    SystemConfig probe = base;
    if (variable == SweepVariable::K) probe.K = static_cast<int>(values.front());
    if (variable == SweepVariable::N) probe.N = static_cast<int>(values.front());
    if (variable == SweepVariable::alpha) probe.alpha = values.front();
    probe.validate();
  } catch (const std::exception& e) {
    bad.push_back(std::string("config (") + e.what() + ")");
  }
  if (!fading.uniform && !(fading.radius_m > 0.0))
    bad.push_back("fading.radius_m (<= 0)");
  if (fading.uniform && !(fading.d > 0.0)) bad.push_back("fading.d (<= 0)");
  if (!bad.empty()) {
    std::string msg = "invalid experiment spec:";
    for (const auto& f : bad) msg += " " + f + ";";
    throw std::invalid_argument(msg);
  }
}

namespace {

struct RowTask {
  std::size_t row;
  std::size_t design;
};

DesignResult run_one_design(const ExperimentSpec& spec, const SystemConfig& cfg,
                            const FadingProfile& fading, DesignKind design,
                            const std::vector<int>& alphaT_grid,
                            std::uint64_t seed) {
  PipelineOptions po;
  po.alphaT_grid = alphaT_grid;
  po.alpha_grid_points = spec.alpha_grid_points;
  po.scan_trials = spec.scan_trials;
  po.solver.mc_draws = spec.solver_draws;
  po.solver.t_grid = spec.solver_t_grid;
  po.solver.t_refine_tol = spec.solver_t_refine_tol;
  po.solver.max_iterations = spec.solver_max_iterations;
  po.solver.pg_tol = spec.solver_pg_tol;
  po.solver.throw_on_nonconvergence = false;

  DesignPoint dp;
  switch (design) {
    case DesignKind::upper:
      dp = upper_bound_pipeline(cfg, fading, spec.trials, seed, po);
      break;
    case DesignKind::lower:
      dp = lower_bound_pipeline(cfg, fading, spec.trials, seed, po);
      break;
    case DesignKind::uniform_exact: {
      UniformPipelineOptions uo;
      uo.alphaT_grid = alphaT_grid;
      uo.alpha_grid_points = spec.alpha_grid_points;
      uo.scan_trials = spec.scan_trials;
      dp = optimize_uniform(cfg, fading.d[0], spec.trials, seed, uo);
      break;
    }
    case DesignKind::random_pilot:
      dp = random_pilot_baseline(cfg, fading, spec.trials, seed, po);
      break;
  }
  DesignResult r;
  r.design = design;
  r.rate = dp.rate.rate_bits_per_symbol;
  r.ci = dp.rate.ci_halfwidth;
  r.alpha_opt = dp.alpha;
  r.active_users = static_cast<int>(dp.active_set.size());
  return r;
}

}  // namespace

std::vector<SweepRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t nrows = spec.values.size();
  const std::size_t ndes = spec.designs.size();
  std::vector<SweepRow> rows(nrows);
  for (std::size_t i = 0; i < nrows; ++i) {
    rows[i].swept = spec.values[i];
    rows[i].designs.resize(ndes);
  }

  std::vector<RowTask> tasks;
  for (std::size_t i = 0; i < nrows; ++i)
    for (std::size_t j = 0; j < ndes; ++j) tasks.push_back({i, j});

  parallel_for(tasks.size(), [&](std::size_t ti) {
    const auto [i, j] = tasks[ti];
    const double v = spec.values[i];
    SystemConfig cfg = spec.base;
    std::vector<int> agrid = spec.alphaT_grid;
    switch (spec.variable) {
      case SweepVariable::K: cfg.K = static_cast<int>(std::lround(v)); break;
      case SweepVariable::rho0_db:
        cfg.N0 = cfg.P0 / std::pow(10.0, v / 10.0);
        break;
      case SweepVariable::N: cfg.N = static_cast<int>(std::lround(v)); break;
      case SweepVariable::alpha:
        agrid = {static_cast<int>(std::lround(v * cfg.T))};
        cfg.alpha = static_cast<double>(agrid.front()) / cfg.T;
        break;
    }
    FadingProfile fading;
    if (spec.fading.uniform) {
      fading.d = VectorXd::Constant(cfg.K, spec.fading.d);
    } else {
      fading = sample_scenario(cfg.K, spec.fading.radius_m, spec.fading.drop_seed);
    }
    DesignResult& slot = rows[i].designs[j];
    try {
      slot = run_one_design(spec, cfg, fading, spec.designs[j], agrid,
                            mix_seed(spec.seed, i));
    } catch (const std::exception& e) {
      slot.design = spec.designs[j];
      slot.rate = 0.0;
      slot.ci.reset();
      slot.alpha_opt = 0.0;
      slot.active_users = 0;
      slot.error = e.what();
    }
  });

  if (!spec.out.empty()) {
    emit_csv(rows, spec.out + ".csv");
    emit_json(rows, spec.out + ".json");
  }
  return rows;
}

std::string rows_to_csv(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("rows_to_csv: empty rows");
  std::string out = "swept,design,rate,ci,alpha_opt,active_users\n";
  for (const auto& row : rows) {
    for (const auto& d : row.designs) {
      out += fmt17(row.swept);
      out += ',';
      out += to_string(d.design);
      out += ',';
      out += fmt17(d.rate);
      out += ',';
      if (d.ci) out += fmt17(*d.ci);
      out += ',';
      out += fmt17(d.alpha_opt);
      out += ',';
      out += std::to_string(d.active_users);
      out += '\n';
    }
  }
  return out;
}

std::vector<SweepRow> rows_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("rows_from_csv: empty input");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (std::size_t p = 0; p <= line.size(); ++p) {
      if (p == line.size() || line[p] == ',') {
        cells.push_back(line.substr(start, p - start));
        start = p + 1;
      }
    }
    if (cells.size() != 6)
      throw std::invalid_argument("rows_from_csv: malformed line: " + line);
    const double swept = std::stod(cells[0]);
    if (rows.empty() || rows.back().swept != swept) {
      rows.push_back(SweepRow{swept, {}});
    }
    DesignResult d;
    d.design = design_from_string(cells[1]);
    d.rate = std::stod(cells[2]);
    if (!cells[3].empty()) d.ci = std::stod(cells[3]);
    d.alpha_opt = std::stod(cells[4]);
    d.active_users = std::stoi(cells[5]);
    rows.back().designs.push_back(std::move(d));
  }
  return rows;
}

std::string rows_to_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& row : rows) {
    json jr;
    jr["swept"] = row.swept;
    jr["designs"] = json::array();
    for (const auto& d : row.designs) {
      json jd;
      jd["design"] = to_string(d.design);
      jd["rate"] = d.rate;
      if (d.ci)
        jd["ci"] = *d.ci;
      else
        jd["ci"] = nullptr;
      jd["alpha_opt"] = d.alpha_opt;
      jd["active_users"] = d.active_users;
      if (!d.error.empty()) jd["error"] = d.error;
      jr["designs"].push_back(std::move(jd));
    }
    arr.push_back(std::move(jr));
  }
  return arr.dump(2) + "\n";
}

std::vector<SweepRow> rows_from_json(const std::string& json_text) {
  const json arr = json::parse(json_text);
  std::vector<SweepRow> rows;
  for (const auto& jr : arr) {
    SweepRow row;
    row.swept = jr.at("swept").get<double>();
    for (const auto& jd : jr.at("designs")) {
      DesignResult d;
      d.design = design_from_string(jd.at("design").get<std::string>());
      d.rate = jd.at("rate").get<double>();
      if (!jd.at("ci").is_null()) d.ci = jd.at("ci").get<double>();
      d.alpha_opt = jd.at("alpha_opt").get<double>();
      d.active_users = jd.at("active_users").get<int>();
      if (jd.contains("error")) d.error = jd.at("error").get<std::string>();
      row.designs.push_back(std::move(d));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  for (const auto& row : rows)
    for (const auto& d : row.designs)
      if (!std::isfinite(d.rate) || d.rate < 0.0)
        throw std::runtime_error("emit_csv: non-finite or negative rate");
  write_file(path, rows_to_csv(rows));
}

void emit_json(const std::vector<SweepRow>& rows, const std::string& path) {
  write_file(path, rows_to_json(rows));
}

ExperimentSpec spec_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  ExperimentSpec s;
  s.name = j.value("name", "");
  const json& sw = j.at("sweep");
  s.variable = sweep_from_string(sw.at("variable").get<std::string>());
  s.values = sw.at("values").get<std::vector<double>>();

  const json& c = j.value("config", json::object());
  s.base.N = c.value("N", 50);
  s.base.K = c.value("K", 20);
  s.base.T = c.value("T", 100);
  s.base.alpha = c.value("alpha", 0.5);
  s.base.P0 = c.value("P0", 1.0);
  if (c.contains("rho0_db"))
    s.base.N0 = s.base.P0 / std::pow(10.0, c.at("rho0_db").get<double>() / 10.0);
  else
    s.base.N0 = c.value("N0", 1e-3);

  const json& f = j.value("fading", json::object());
  const std::string mode = f.value("mode", "scenario");
  if (mode == "uniform") {
    s.fading.uniform = true;
    s.fading.d = f.value("d", 1.0);
  } else if (mode == "scenario") {
    s.fading.uniform = false;
    s.fading.radius_m = f.value("radius_m", 100.0);
    s.fading.drop_seed = f.value("drop_seed", 1ULL);
  } else {
    throw std::invalid_argument("unknown fading mode: " + mode);
  }

  for (const auto& dn : j.at("designs"))
    s.designs.push_back(design_from_string(dn.get<std::string>()));
  s.trials = j.value("trials", 500L);
  s.seed = j.value("seed", 1ULL);
  s.out = j.value("out", "");

  const json& srch = j.value("search", json::object());
  if (srch.contains("alphaT_grid"))
    s.alphaT_grid = srch.at("alphaT_grid").get<std::vector<int>>();
  s.alpha_grid_points = srch.value("alpha_grid_points", 19);
  s.scan_trials = srch.value("scan_trials", 192L);
  s.solver_draws = srch.value("solver_draws", 16);
  s.solver_t_grid = srch.value("solver_t_grid", 12);
  s.solver_t_refine_tol = srch.value("solver_t_refine_tol", 3e-3);
  s.solver_max_iterations = srch.value("solver_max_iterations", 600);
  s.solver_pg_tol = srch.value("solver_pg_tol", 1e-5);
  s.validate();
  return s;
}

ExperimentSpec spec_from_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open spec file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return spec_from_json_text(ss.str());
}

std::string pilot_to_json_text(const PilotMatrix& pilot) {
  json j;
  j["rows"] = pilot.Xp.rows();
  j["cols"] = pilot.Xp.cols();
  json data = json::array();
  for (Eigen::Index i = 0; i < pilot.Xp.rows(); ++i)
    for (Eigen::Index c = 0; c < pilot.Xp.cols(); ++c) {
      data.push_back(pilot.Xp(i, c).real());
      data.push_back(pilot.Xp(i, c).imag());
    }
  j["data"] = std::move(data);
  json rp = json::array();
  for (Eigen::Index i = 0; i < pilot.row_powers.size(); ++i)
    rp.push_back(pilot.row_powers[i]);
  j["row_powers"] = std::move(rp);
  return j.dump(2) + "\n";
}

PilotMatrix pilot_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != 2 * rows * cols)
    throw std::invalid_argument("pilot json: data length mismatch");
  MatrixXcd Xp(rows, cols);
  std::size_t p = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) {
      Xp(i, c) = {data[p], data[p + 1]};
      p += 2;
    }
  return PilotMatrix::from_matrix(std::move(Xp));
}

}  // namespace mumimo
