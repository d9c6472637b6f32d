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

// Seeded random instances shared by the unit and acceptance tests.

#pragma once

#include <random>

#include "stdar/stdar.hpp"

namespace testing_support {

using stdar::MatrixXd;
using stdar::Problem;
using stdar::VectorXd;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  MatrixXd gaussian(int r, int c) {
    MatrixXd m(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }
  VectorXd gaussian(int n) { return gaussian(n, 1).col(0); }

  /// L L' / cols + shift I.
  MatrixXd spd(int n, double shift) {
    const MatrixXd L = gaussian(n, n);
    return L * L.transpose() / double(n) + shift * MatrixXd::Identity(n, n);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct Shape {
  int n = 2, m = 2, q = 1, N = 3;
};

/// Random instance satisfying the hard assumptions: G = B T gives range
/// inclusion, Pf > 0 gives G'PfG != 0. A is scaled to spectral radius in
/// [0.3, 1.3].
inline Problem random_problem(Rng& rng, const Shape& s) {
  MatrixXd A = rng.gaussian(s.n, s.n);
  Eigen::EigenSolver<MatrixXd> es(A, false);
  const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
  if (rho > 0) A *= rng.uniform(0.3, 1.3) / rho;
  const MatrixXd B = rng.gaussian(s.n, s.m);
  const MatrixXd G = B * rng.gaussian(s.m, s.q) * rng.uniform(0.3, 1.0);
  VectorXd alpha(s.N);
  for (int k = 0; k < s.N; ++k) alpha(k) = rng.uniform(0.2, 2.0);
  return Problem(A, B, G, rng.spd(s.n, 0.1), rng.spd(s.m, 0.5), rng.spd(s.n, 0.5),
                 stdar::StageBoundSchedule<double>(alpha), rng.gaussian(s.n));
}

inline Shape random_shape(Rng& rng, int max_dim, int max_N) {
  Shape s;
  s.n = rng.integer(1, max_dim);
  s.m = rng.integer(1, max_dim);
  s.q = rng.integer(1, max_dim);
  s.N = rng.integer(1, max_N);
  return s;
}

/// Random strictly feasible multipliers via slack coordinates.
inline stdar::RiccatiSweep<double> random_feasible_sweep(Rng& rng, const Problem& p, double smin = 0.05,
                                                         double smax = 3.0) {
  VectorXd s(p.horizon());
  for (int k = 0; k < p.horizon(); ++k) s(k) = rng.uniform(smin, smax);
  return stdar::sweep_from_slack(p, s, 0);
}

inline Problem scalar_problem(double a, double b, double g, double q, double r, double pf, int N, double alpha,
                              double x0) {
  auto c = [](double v) { return MatrixXd::Constant(1, 1, v); };
  return Problem(c(a), c(b), c(g), c(q), c(r), c(pf), stdar::StageBoundSchedule<double>::constant(N, alpha),
                 VectorXd::Constant(1, x0));
}

}  // namespace testing_support
