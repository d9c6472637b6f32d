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

#include "stdar/io/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "stdar/steady_state.hpp"

namespace stdar::io {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

std::uint64_t instance_seed(std::uint64_t seed, int n, int instance) {
  return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(n)) ^
                    static_cast<std::uint64_t>(instance));
}

Problem random_stable_system(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd A(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) A(i, j) = normal(rng);
  Eigen::EigenSolver<MatrixXd> es(A, false);
  const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
  if (rho > 0) A *= 0.9 / rho;
  const MatrixXd I = MatrixXd::Identity(n, n);
  return Problem(A, I, I, I, I, I, StageBoundSchedule<double>::constant(1, 1.0), VectorXd::Zero(n));
}

std::optional<double> fit_loglog_slope(const std::vector<double>& n, const std::vector<double>& t) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < n.size() && i < t.size(); ++i) {
    if (n[i] > 0 && t[i] > 0) {
      x.push_back(std::log(n[i]));
      y.push_back(std::log(t[i]));
    }
  }
  if (x.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) return std::nullopt;
  return sxy / sxx;
}

BenchReport run_bench(const BenchConfig& cfg, std::ostream* log) {
  BenchReport report;
  std::vector<double> ns, ts;
  for (int n : cfg.sizes) {
    BenchRow row;
    row.n = n;
    for (int i = 0; i < cfg.instances; ++i) {
      const Problem p = random_stable_system(n, instance_seed(cfg.seed, n, i));
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const auto sol = solve_steady_state(p);
        (void)sol;
      } catch (const Error& e) {
        ++row.failures;
        if (log) *log << "n=" << n << " instance " << i << ": " << e.what() << "\n";
        continue;
      }
      const auto t1 = std::chrono::steady_clock::now();
      row.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    row.median = median(row.seconds);
    if (log) *log << "n=" << n << " median " << row.median << " s\n";
    if (!row.seconds.empty()) {
      ns.push_back(n);
      ts.push_back(row.median);
    }
    report.rows.push_back(std::move(row));
  }
  report.exponent = fit_loglog_slope(ns, ts);
  return report;
}

}  // namespace stdar::io
