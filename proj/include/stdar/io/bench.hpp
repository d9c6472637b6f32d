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

// Random stable systems and the steady-state timing study.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include "stdar/core_types.hpp"

namespace stdar::io {

/// Seed of instance i at size n, derived from the run seed only.
std::uint64_t instance_seed(std::uint64_t seed, int n, int instance);

/// Gaussian A rescaled to spectral radius 0.9; B = G = Q = R = Pf = I_n.
Problem random_stable_system(int n, std::uint64_t seed);

struct BenchConfig {
  std::vector<int> sizes;
  int instances = 4;
  std::uint64_t seed = 1;
};

struct BenchRow {
  int n = 0;
  std::vector<double> seconds;  // one per instance; failed instances omitted
  double median = 0;
  int failures = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::optional<double> exponent;  // least-squares slope of log t against log n
};

std::optional<double> fit_loglog_slope(const std::vector<double>& n, const std::vector<double>& t);

BenchReport run_bench(const BenchConfig& cfg, std::ostream* log = nullptr);

}  // namespace stdar::io
