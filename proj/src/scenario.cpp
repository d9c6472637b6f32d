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

#include "stdar/io/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace stdar::io {
namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, std::size_t offset) {
  if (offset > text.size()) offset = text.size();
  int line = 1;
  for (std::size_t i = 0; i < offset; ++i) line += text[i] == '\n' ? 1 : 0;
  return line;
}

// Best-effort location of a key for schema errors: first occurrence of
// "key" after the opening of its enclosing block.
class Locator {
 public:
  explicit Locator(const std::string& text) : text_(text) {}

  int line(const std::string& block, const std::string& key) const {
    std::size_t from = 0;
    if (!block.empty()) {
      const auto b = text_.find("\"" + block + "\"");
      if (b == std::string::npos) return 0;
      from = b;
      if (key.empty()) return line_of_offset(text_, b);
    }
    const auto k = text_.find("\"" + key + "\"", from);
    return k == std::string::npos ? 0 : line_of_offset(text_, k);
  }

 private:
  const std::string& text_;
};

[[noreturn]] void fail(const Locator& loc, const std::string& block, const std::string& key,
                       const std::string& what) {
  int line = loc.line(block, key);
  if (line == 0) line = loc.line("", block);
  throw ParseError(line, (block.empty() ? key : block + "." + key) + ": " + what);
}

double number(const json& v, const Locator& loc, const std::string& block, const std::string& key) {
  if (!v.is_number()) fail(loc, block, key, "expected a number");
  return v.get<double>();
}

MatrixXd matrix(const json& v, const Locator& loc, const std::string& block, const std::string& key) {
  if (v.is_number()) return MatrixXd::Constant(1, 1, v.get<double>());
  if (!v.is_array() || v.empty()) fail(loc, block, key, "expected a non-empty list of rows");
  // A flat list of numbers is read as a single row only for 1 x n data;
  // matrices should always be written as lists of rows.
  if (v[0].is_number()) {
    MatrixXd m(1, static_cast<Eigen::Index>(v.size()));
    for (std::size_t j = 0; j < v.size(); ++j) m(0, static_cast<Eigen::Index>(j)) = number(v[j], loc, block, key);
    return m;
  }
  const std::size_t rows = v.size();
  if (!v[0].is_array()) fail(loc, block, key, "expected rows to be lists");
  const std::size_t cols = v[0].size();
  MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) fail(loc, block, key, "ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = number(v[i][j], loc, block, key);
    }
  }
  return m;
}

VectorXd vector(const json& v, const Locator& loc, const std::string& block, const std::string& key) {
  if (v.is_number()) return VectorXd::Constant(1, v.get<double>());
  if (!v.is_array()) fail(loc, block, key, "expected a list of numbers");
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = number(v[i], loc, block, key);
  return out;
}

const json& require(const json& obj, const Locator& loc, const std::string& block, const std::string& key) {
  if (!obj.contains(key)) fail(loc, block, "", "missing key \"" + key + "\"");
  return obj.at(key);
}

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Tol parse_tolerances(const json& t, const Locator& loc) {
  Tol tol;
  if (!t.is_object()) fail(loc, "", "tolerances", "expected an object");
  const std::pair<const char*, double*> fields[] = {
      {"tol_psd", &tol.tol_psd},           {"tol_residual", &tol.tol_residual},
      {"tol_range", &tol.tol_range},       {"tol_zero", &tol.tol_zero},
      {"eps_boundary", &tol.eps_boundary}, {"fd_step", &tol.fd_step},
  };
  for (auto it = t.begin(); it != t.end(); ++it) {
    bool known = false;
    for (const auto& [name, dst] : fields) {
      if (it.key() == name) {
        *dst = number(it.value(), loc, "tolerances", name);
        known = true;
      }
    }
    if (!known) fail(loc, "tolerances", it.key(), "unknown tolerance");
  }
  try {
    tol.check();
  } catch (const Error& e) {
    fail(loc, "", "tolerances", e.what());
  }
  return tol;
}

RunConfig parse_run(const json& r, const Locator& loc, int n) {
  RunConfig run;
  if (!r.is_object()) fail(loc, "", "run", "expected an object");
  for (auto it = r.begin(); it != r.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    if (key == "mode") {
      if (!v.is_string()) fail(loc, "run", key, "expected a string");
      run.mode = v.get<std::string>();
    } else if (key == "x0_list") {
      if (!v.is_array()) fail(loc, "run", key, "expected a list of states");
      for (const auto& x : v) {
        VectorXd xv = vector(x, loc, "run", key);
        if (xv.size() != n) fail(loc, "run", key, "state dimension must equal n");
        run.x0_list.push_back(xv);
      }
    } else if (key == "x0_grid") {
      Grid g;
      if (!v.is_object()) fail(loc, "run", key, "expected {lo, hi, points}");
      g.lo = number(require(v, loc, "run", "lo"), loc, "run", "lo");
      g.hi = number(require(v, loc, "run", "hi"), loc, "run", "hi");
      const json& pts = require(v, loc, "run", "points");
      if (!pts.is_number_integer() || pts.get<int>() < 1) fail(loc, "run", "points", "expected a positive integer");
      g.points = pts.get<int>();
      run.x0_grid = g;
    } else if (key == "direction") {
      VectorXd d = vector(v, loc, "run", key);
      if (d.size() != n) fail(loc, "run", key, "direction must have n entries");
      run.direction = d;
    } else if (key == "rollout_mode") {
      if (!v.is_string()) fail(loc, "run", key, "expected a string");
      run.rollout_mode = v.get<std::string>();
      if (run.rollout_mode != "worst_case" && run.rollout_mode != "external" && run.rollout_mode != "zero") {
        fail(loc, "run", key, "expected worst_case, external or zero");
      }
    } else if (key == "disturbances") {
      if (!v.is_array()) fail(loc, "run", key, "expected a list of vectors");
      for (const auto& w : v) run.disturbances.push_back(vector(w, loc, "run", key));
    } else if (key == "output_dir") {
      if (!v.is_string()) fail(loc, "run", key, "expected a string");
      run.output_dir = v.get<std::string>();
    } else if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        fail(loc, "run", key, "expected a nonnegative integer");
      }
      run.seed = v.get<std::uint64_t>();
    } else if (key == "bench_sizes") {
      if (!v.is_array()) fail(loc, "run", key, "expected a list of sizes");
      for (const auto& s : v) {
        if (!s.is_number_integer() || s.get<int>() < 1) fail(loc, "run", key, "sizes must be positive integers");
        run.bench_sizes.push_back(s.get<int>());
      }
    } else if (key == "bench_instances") {
      if (!v.is_number_integer() || v.get<int>() < 1) fail(loc, "run", key, "expected a positive integer");
      run.bench_instances = v.get<int>();
    } else if (key == "allow_degenerate_terminal") {
      if (!v.is_boolean()) fail(loc, "run", key, "expected true or false");
      run.allow_degenerate_terminal = v.get<bool>();
    } else {
      fail(loc, "run", key, "unknown key");
    }
  }
  return run;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
  const Locator loc(text);
  if (!doc.is_object()) throw ParseError(1, "top level must be an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() != "problem" && it.key() != "run" && it.key() != "tolerances") {
      fail(loc, "", it.key(), "unknown top-level key");
    }
  }
  Scenario s;
  if (doc.contains("tolerances")) s.tolerances = parse_tolerances(doc["tolerances"], loc);

  const json& pr = require(doc, loc, "", "problem");
  if (!pr.is_object()) fail(loc, "", "problem", "expected an object");
  for (auto it = pr.begin(); it != pr.end(); ++it) {
    static const char* known[] = {"A", "B", "G", "Q", "R", "Pf", "N", "alpha", "x0"};
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) fail(loc, "problem", it.key(), "unknown key");
  }
  const MatrixXd A = matrix(require(pr, loc, "problem", "A"), loc, "problem", "A");
  const MatrixXd B = matrix(require(pr, loc, "problem", "B"), loc, "problem", "B");
  const MatrixXd G = matrix(require(pr, loc, "problem", "G"), loc, "problem", "G");
  const MatrixXd Q = matrix(require(pr, loc, "problem", "Q"), loc, "problem", "Q");
  const MatrixXd R = matrix(require(pr, loc, "problem", "R"), loc, "problem", "R");
  const MatrixXd Pf = matrix(require(pr, loc, "problem", "Pf"), loc, "problem", "Pf");
  const json& alpha = require(pr, loc, "problem", "alpha");
  std::optional<int> N;
  if (pr.contains("N")) {
    if (!pr["N"].is_number_integer() || pr["N"].get<long long>() < 1) fail(loc, "problem", "N", "expected a positive integer");
    N = pr["N"].get<int>();
  }
  StageBoundSchedule<double> sched;
  try {
    if (alpha.is_number()) {
      if (!N) fail(loc, "problem", "N", "required when alpha is a single number");
      sched = StageBoundSchedule<double>::constant(*N, alpha.get<double>());
    } else {
      VectorXd a = vector(alpha, loc, "problem", "alpha");
      if (N && a.size() != *N) fail(loc, "problem", "alpha", "list length must equal N");
      sched = StageBoundSchedule<double>(a);
    }
  } catch (const AssumptionViolated& e) {
    fail(loc, "problem", "alpha", e.what());
  }
  VectorXd x0 = VectorXd::Zero(A.rows());
  if (pr.contains("x0")) x0 = vector(pr["x0"], loc, "problem", "x0");
  try {
    s.problem = Problem(A, B, G, Q, R, Pf, sched, x0, s.tolerances);
  } catch (const Error& e) {
    fail(loc, "", "problem", e.what());
  }
  if (doc.contains("run")) s.run = parse_run(doc["run"], loc, s.problem.n());
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
  const Problem& p = s.problem;
  json doc;
  doc["problem"] = {
      {"A", matrix_json(p.A())},   {"B", matrix_json(p.B())},  {"G", matrix_json(p.G())},
      {"Q", matrix_json(p.Q())},   {"R", matrix_json(p.R())},  {"Pf", matrix_json(p.Pf())},
      {"N", p.horizon()},          {"alpha", vector_json(p.schedule().alpha())},
      {"x0", vector_json(p.x0())},
  };
  json run;
  run["mode"] = s.run.mode;
  json xs = json::array();
  for (const auto& x : s.run.x0_list) xs.push_back(vector_json(x));
  run["x0_list"] = xs;
  if (s.run.x0_grid) run["x0_grid"] = {{"lo", s.run.x0_grid->lo}, {"hi", s.run.x0_grid->hi}, {"points", s.run.x0_grid->points}};
  if (s.run.direction) run["direction"] = vector_json(*s.run.direction);
  run["rollout_mode"] = s.run.rollout_mode;
  json ws = json::array();
  for (const auto& w : s.run.disturbances) ws.push_back(vector_json(w));
  run["disturbances"] = ws;
  run["output_dir"] = s.run.output_dir;
  run["seed"] = s.run.seed;
  run["bench_sizes"] = s.run.bench_sizes;
  run["bench_instances"] = s.run.bench_instances;
  run["allow_degenerate_terminal"] = s.run.allow_degenerate_terminal;
  doc["run"] = run;
  const Tol& t = s.tolerances;
  doc["tolerances"] = {{"tol_psd", t.tol_psd},   {"tol_residual", t.tol_residual},
                       {"tol_range", t.tol_range}, {"tol_zero", t.tol_zero},
                       {"eps_boundary", t.eps_boundary}, {"fd_step", t.fd_step}};
  return doc.dump(2) + "\n";
}

Problem rebuild_problem(const Problem& p, const Tol& tol) {
  return Problem(p.A(), p.B(), p.G(), p.Q(), p.R(), p.Pf(), p.schedule(), p.x0(), tol);
}

}  // namespace stdar::io
