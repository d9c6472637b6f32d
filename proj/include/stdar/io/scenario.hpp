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

// Scenario files: one JSON document with a "problem" block, an optional
// "run" block and optional "tolerances".
//
//   {
//     "problem": {
//       "A": [[1]], "B": [[1]], "G": [[1]], "Q": [[0.2]], "R": [[1]], "Pf": [[0]],
//       "N": 100, "alpha": 1.0, "x0": [20]
//     },
//     "run": { "mode": "finite", "x0_list": [[0], [1], [3]], "output_dir": "out" },
//     "tolerances": { "tol_psd": 1e-9 }
//   }
//
// Matrices are lists of rows; a bare number is accepted for a 1x1 matrix or
// a length-1 vector. "alpha" is a number (broadcast to N stages) or a list
// of length N, in which case "N" may be omitted.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stdar/core_types.hpp"

namespace stdar::io {

struct Grid {
  double lo = -2;
  double hi = 2;
  int points = 401;
};

struct RunConfig {
  std::string mode = "finite";  // finite | steady | rollout | policy-curve | bench | validate
  std::vector<VectorXd> x0_list;
  std::optional<Grid> x0_grid;
  std::optional<VectorXd> direction;  // policy curve direction for n > 1
  std::string rollout_mode = "worst_case";  // worst_case | external | zero
  std::vector<VectorXd> disturbances;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  std::vector<int> bench_sizes;
  int bench_instances = 4;
  bool allow_degenerate_terminal = false;
};

struct Scenario {
  Problem problem;
  RunConfig run;
  Tol tolerances;
};

/// Parses scenario text. Syntax and schema errors raise ParseError with the
/// 1-based line of the offending token or key.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Canonical JSON form; parse_scenario(serialize_scenario(s)) reproduces s.
std::string serialize_scenario(const Scenario& s);

/// Same problem with the data re-validated under new tolerances.
Problem rebuild_problem(const Problem& p, const Tol& tol);

}  // namespace stdar::io
