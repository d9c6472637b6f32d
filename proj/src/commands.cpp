// Copyright 2026 The stdar Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stdar/io/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "stdar/io/bench.hpp"
#include "stdar/io/csv.hpp"
#include "stdar/stdar.hpp"

namespace stdar::io {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string prepare_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + out_dir + ": " + ec.message());
  return out_dir;
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << doc.dump(2) << "\n";
}

json to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void append(std::vector<double>& row, const MatrixXd& m) {
  // Row-major flattening, matching the column names.
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
}

void append(std::vector<double>& row, const VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
}

std::vector<std::string> matrix_columns(const std::string& name, int rows, int cols) {
  std::vector<std::string> out;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out.push_back(name + "_" + std::to_string(i) + "_" + std::to_string(j));
  return out;
}

template <typename... Lists>
std::vector<std::string> concat(std::initializer_list<std::string> head, const Lists&... lists) {
  std::vector<std::string> out(head);
  (out.insert(out.end(), lists.begin(), lists.end()), ...);
  return out;
}

// Validates under the scenario's flags; returns 0 or the validation exit code.
int check_problem(const Scenario& s, std::ostream& log) {
  ValidationOptions vo;
  vo.allow_degenerate_terminal = s.run.allow_degenerate_terminal;
  try {
    const auto report = validate_problem(s.problem, s.tolerances, vo);
    for (const auto& c : report.checks) {
      if (!c.passed) log << "warning: " << to_string(c.which) << ": " << c.detail << "\n";
    }
  } catch (const AssumptionViolated& e) {
    log << "validation failed: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kAssumptionViolated:
    case ErrorCode::kParseError:
    case ErrorCode::kDimensionMismatch:
      return kExitValidation;
    case ErrorCode::kNoFeasibleLambda:
    case ErrorCode::kFixedPointDiverged:
    case ErrorCode::kDiverged:
    case ErrorCode::kBracketingFailed:
    case ErrorCode::kNonConvergedEigen:
      return kExitNonConvergence;
    default:
      return kExitError;
  }
}

int cmd_validate(const Scenario& s, std::ostream& log) {
  ValidationOptions vo;
  vo.allow_degenerate_terminal = s.run.allow_degenerate_terminal;
  const auto report = evaluate_assumptions(s.problem, s.tolerances, vo);
  for (const auto& c : report.checks) {
    log << (c.passed ? "pass" : (c.hard ? "FAIL" : "warn")) << "  " << to_string(c.which) << ": " << c.detail
        << "\n";
  }
  return report.ok() ? kExitOk : kExitValidation;
}

int cmd_finite(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  if (const int rc = check_problem(s, log)) return rc;
  prepare_dir(out_dir);
  const Problem& p = s.problem;
  const int n = p.n(), N = p.horizon();
  std::vector<VectorXd> xs = s.run.x0_list;
  if (xs.empty()) xs.push_back(p.x0());

  int rc = kExitOk;
  json summary = json::array();
  const auto header = concat({"k"}, matrix_columns("Pi", n, n), std::vector<std::string>{"lambda", "value"});
  for (std::size_t i = 0; i < xs.size(); ++i) {
    json entry;
    entry["x0"] = to_json(xs[i]);
    try {
      const auto sol = solve_multipliers(p, xs[i], 0, std::nullopt, s.tolerances);
      const std::string path = (fs::path(out_dir) / ("finite_x0_" + std::to_string(i) + ".csv")).string();
      CsvWriter csv(path, header);
      for (int k = 0; k <= N; ++k) {
        std::vector<double> row{double(k)};
        append(row, sol.sweep.Pi(k));
        row.push_back(k < N ? sol.lam_star.at(k) : kNaN);
        row.push_back(sol.value);
        csv.row(row);
      }
      int on_boundary = 0;
      for (bool b : sol.boundary_flags) on_boundary += b ? 1 : 0;
      entry["value"] = sol.value;
      entry["iterations"] = sol.iterations;
      entry["converged"] = sol.converged;
      entry["grad_norm"] = sol.grad_norm;
      entry["stages_on_boundary"] = on_boundary;
      entry["csv"] = path;
      log << "x0[" << i << "]: V* = " << format_double(sol.value) << " (" << sol.iterations << " iterations"
          << (sol.converged ? "" : ", NOT converged") << ")\n";
      if (!sol.converged) rc = std::max(rc, kExitNonConvergence);
    } catch (const Error& e) {
      entry["error"] = e.what();
      log << "x0[" << i << "]: " << e.what() << "\n";
      rc = std::max(rc, exit_code_for(e));
    }
    summary.push_back(entry);
  }
  write_json((fs::path(out_dir) / "finite_summary.json").string(), summary);
  return rc;
}

int cmd_policy_curve(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  if (const int rc = check_problem(s, log)) return rc;
  prepare_dir(out_dir);
  const Problem& p = s.problem;
  const Grid g = s.run.x0_grid.value_or(Grid{});
  VectorXd dir = s.run.direction.value_or(VectorXd::Unit(p.n(), 0));
  const auto header = concat({"x0"}, indexed_columns("u", p.m()), std::vector<std::string>{"lambda_0", "value"});
  CsvWriter csv((fs::path(out_dir) / "policy_curve.csv").string(), header);
  int rc = kExitOk;
  for (int i = 0; i < g.points; ++i) {
    // Weighted endpoints: mirrored points of a symmetric grid are exact negatives.
    const double t = g.points == 1 ? g.lo
                                   : (double(g.points - 1 - i) * g.lo + double(i) * g.hi) / double(g.points - 1);
    const VectorXd x = t * dir;
    // Cold start at every point keeps u(-x) = -u(x) exact.
    const auto sol = solve_multipliers(p, x, 0, std::nullopt, s.tolerances);
    if (!sol.converged) rc = kExitNonConvergence;
    std::vector<double> row{t};
    append(row, VectorXd(control_from_sweep(sol.sweep, x)));
    row.push_back(sol.lam_star.lambdas(0));
    row.push_back(sol.value);
    csv.row(row);
  }
  log << "wrote " << g.points << " points to " << csv.path() << "\n";
  return rc;
}

int cmd_rollout(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  if (const int rc = check_problem(s, log)) return rc;
  prepare_dir(out_dir);
  Problem p = s.problem;
  if (!s.run.x0_list.empty()) p = p.with_initial_state(s.run.x0_list.front());
  DisturbanceMode mode = DisturbanceMode::kWorstCase;
  if (s.run.rollout_mode == "external") mode = DisturbanceMode::kExternal;
  if (s.run.rollout_mode == "zero") mode = DisturbanceMode::kZero;
  const auto tr = rollout(p, mode, s.run.disturbances, s.tolerances);
  const int n = p.n(), m = p.m(), q = p.q(), N = p.horizon();
  const auto header = concat({"k"}, indexed_columns("x", n), indexed_columns("u", m), indexed_columns("w", q),
                             std::vector<std::string>{"lambda_k", "stage_cost"});
  CsvWriter csv((fs::path(out_dir) / "rollout.csv").string(), header);
  for (int k = 0; k <= N; ++k) {
    std::vector<double> row{double(k)};
    append(row, tr.x[k]);
    if (k < N) {
      append(row, tr.u[k]);
      append(row, tr.w[k]);
      row.push_back(tr.lambda[k]);
      row.push_back(tr.stage_cost[k]);
    } else {
      row.insert(row.end(), static_cast<std::size_t>(m + q), kNaN);
      row.push_back(kNaN);
      row.push_back(tr.terminal_cost);
    }
    csv.row(row);
  }
  json summary;
  summary["total_cost"] = tr.total_cost;
  summary["terminal_cost"] = tr.terminal_cost;
  summary["disturbance_energy"] = tr.disturbance_energy;
  summary["alpha_bar"] = p.schedule().alpha_bar();
  summary["value_stage0"] = tr.value.front();
  summary["cost_over_alpha_bar"] = tr.total_cost / p.schedule().alpha_bar();
  if (tr.disturbance_energy > 0) summary["ratio"] = tr.ratio();
  summary["all_converged"] = tr.all_converged;
  write_json((fs::path(out_dir) / "rollout_summary.json").string(), summary);
  log << "V = " << format_double(tr.total_cost) << ", sum |w|^2 = " << format_double(tr.disturbance_energy)
      << ", phi_0 = " << format_double(tr.value.front()) << "\n";
  return tr.all_converged ? kExitOk : kExitNonConvergence;
}

int cmd_steady(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  if (const int rc = check_problem(s, log)) return rc;
  prepare_dir(out_dir);
  const Problem& p = s.problem;
  const auto sol = solve_steady_state(p, s.tolerances);
  json doc;
  doc["lambda_bar"] = sol.lambda_bar;
  doc["Pi_bar"] = to_json(sol.Pi_bar);
  doc["K_bar"] = to_json(sol.K_bar);
  doc["residual"] = sol.residual;
  doc["boundary_gap"] = sol.boundary_gap;
  doc["lambda_infeasible"] = sol.lambda_infeasible;
  try {
    const auto cert = lmi_certify(p, sol, s.tolerances);
    doc["lmi_min_eig"] = cert.min_eig;
  } catch (const Error& e) {
    doc["lmi_min_eig"] = nullptr;
    doc["lmi_error"] = e.what();
  }
  try {
    doc["Pi_lqr"] = to_json(lqr_baseline(p));
  } catch (const Error& e) {
    doc["Pi_lqr"] = nullptr;
    doc["lqr_error"] = e.what();
  }
  write_json((fs::path(out_dir) / "steady.json").string(), doc);
  log << "lambda_bar = " << format_double(sol.lambda_bar) << ", |Pi_bar| = " << format_double(sol.Pi_bar.norm())
      << ", boundary gap = " << format_double(sol.boundary_gap) << "\n";
  return kExitOk;
}

int cmd_bench(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  prepare_dir(out_dir);
  BenchConfig cfg;
  cfg.sizes = s.run.bench_sizes;
  if (cfg.sizes.empty()) cfg.sizes = {2, 6, 10, 14, 18, 22, 26, 30};
  cfg.instances = s.run.bench_instances;
  cfg.seed = s.run.seed;
  const auto report = run_bench(cfg, &log);
  CsvWriter times((fs::path(out_dir) / "bench_times.csv").string(), {"n", "instance", "seconds"});
  CsvWriter medians((fs::path(out_dir) / "bench.csv").string(), {"n", "median_seconds", "failures"});
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.seconds.size(); ++i) times.row({double(row.n), double(i), row.seconds[i]});
    medians.row({double(row.n), row.median, double(row.failures)});
  }
  json summary;
  if (report.exponent) {
    summary["exponent"] = *report.exponent;
    log << "fitted exponent " << format_double(*report.exponent) << "\n";
  } else {
    summary["exponent"] = nullptr;
    summary["note"] = "exponent undefined: fewer than two sizes with timings";
    log << "exponent undefined: fewer than two sizes with timings\n";
  }
  write_json((fs::path(out_dir) / "bench_summary.json").string(), summary);
  return kExitOk;
}

int run_scenario(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  const std::string& mode = s.run.mode;
  if (mode == "validate") return cmd_validate(s, log);
  if (mode == "finite") return cmd_finite(s, out_dir, log);
  if (mode == "policy-curve") return cmd_policy_curve(s, out_dir, log);
  if (mode == "rollout") return cmd_rollout(s, out_dir, log);
  if (mode == "steady") return cmd_steady(s, out_dir, log);
  if (mode == "bench") return cmd_bench(s, out_dir, log);
  log << "unknown mode '" << mode << "'\n";
  return kExitError;
}

}  // namespace stdar::io
