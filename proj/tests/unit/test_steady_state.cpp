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

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "random_problems.hpp"
#include "stdar/io/bench.hpp"
#include "stdar/steady_state.hpp"

namespace {

using namespace stdar;
using testing_support::Rng;
using testing_support::scalar_problem;

TEST(SteadyState, ScalarExample) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 0, 1, 1.0, 0.0);
  const auto ss = solve_steady_state(p);
  EXPECT_NEAR(ss.lambda_bar, 1.2, 1e-9);
  EXPECT_NEAR(ss.Pi_bar(0, 0), 1.2, 1e-6);
  EXPECT_NEAR(ss.boundary_gap, 0.0, 1e-6);
  EXPECT_GE(ss.boundary_gap, -1e-9);
  EXPECT_LE(ss.residual, 1e-8 * (1 + ss.Pi_bar.norm()));
}

TEST(SteadyState, MatchesGridScan) {
  const Problem p = scalar_problem(0.5, 1, 1, 0.25, 1, 0, 1, 1.0, 0.0);
  const auto ss = solve_steady_state(p);
  const auto scan = oracle::scalar_steady_scan(0.5, 1, 1, 0.25, 1, 5.0, 10000);
  EXPECT_NEAR(ss.lambda_bar, scan.lambda_bar, 1e-6);
  EXPECT_NEAR(ss.Pi_bar(0, 0), scan.pi_bar, 1e-6);
}

TEST(SteadyState, JointWeightHomogeneity) {
  const double c = 4.0;
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 1, 1, 1.0, 0.0);
  const Problem q = scalar_problem(1, 1, 1, 0.2 * c, 1 * c, 1 * c, 1, 1.0, 0.0);
  const auto a = solve_steady_state(p);
  const auto b = solve_steady_state(q);
  EXPECT_NEAR(b.lambda_bar, c * a.lambda_bar, 1e-8 * c * a.lambda_bar);
  EXPECT_NEAR(b.Pi_bar(0, 0), c * a.Pi_bar(0, 0), 1e-6 * c * a.Pi_bar(0, 0));
}

TEST(SteadyState, DominatesLqr) {
  for (int i = 0; i < 5; ++i) {
    const Problem p = io::random_stable_system(3, 100 + i);
    const auto ss = solve_steady_state(p);
    const MatrixXd lqr = lqr_baseline(p);
    EXPECT_GE(min_sym_eig(MatrixXd(ss.Pi_bar - lqr)), -1e-8 * (1 + ss.Pi_bar.norm()));
    EXPECT_LE(ss.residual, 1e-8 * (1 + ss.Pi_bar.norm()));
    EXPECT_GE(ss.boundary_gap, -1e-9);
  }
}

TEST(SteadyState, InfeasibleJustBelow) {
  for (double a : {1.0, 0.5}) {
    const Problem p = scalar_problem(a, 1, 1, a == 1.0 ? 0.2 : 0.25, 1, 0, 1, 1.0, 0.0);
    const auto ss = solve_steady_state(p);
    EXPECT_FALSE(steady_fixed_point(p, ss.lambda_bar - 1e-4).feasible);
    EXPECT_TRUE(steady_fixed_point(p, ss.lambda_bar + 1e-4).feasible);
  }
}

TEST(SteadyState, DoublingAgreesWithIteration) {
  for (int i = 0; i < 5; ++i) {
    const Problem p = io::random_stable_system(3, 200 + i);
    const double lam = solve_steady_state(p).lambda_bar + 0.5;
    SteadyStateOptions<double> it;
    it.method = FixedPointMethod::kIteration;
    const auto a = steady_fixed_point(p, lam);
    const auto b = steady_fixed_point(p, lam, Tol{}, it);
    ASSERT_TRUE(a.feasible);
    ASSERT_TRUE(b.feasible);
    EXPECT_LE((a.Pi - b.Pi).norm(), 1e-8 * (1 + a.Pi.norm()));
  }
}

TEST(SteadyState, FixedPointOfMap) {
  const Problem p = io::random_stable_system(4, 7);
  const double lam = solve_steady_state(p).lambda_bar * 1.5;
  const auto fp = steady_fixed_point(p, lam);
  ASSERT_TRUE(fp.feasible);
  EXPECT_LE((steady_map(p, fp.Pi, lam) - fp.Pi).norm(), 1e-9 * (1 + fp.Pi.norm()));
}

TEST(Lmi, ScalarCertificate) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 0, 1, 1.0, 0.0);
  const auto ss = solve_steady_state(p);
  const auto cert = lmi_certify(p, ss);
  EXPECT_GE(cert.min_eig, -1e-7);
  EXPECT_EQ(asymmetry(cert.matrix), 0.0);
  EXPECT_GT(min_sym_eig(cert.P), 0.0);
  EXPECT_LT(lmi_certificate_at(p, ss, ss.lambda_bar - 0.1).min_eig, -1e-4);
}

TEST(Lmi, RandomStableSystems) {
  for (int i = 0; i < 5; ++i) {
    const Problem p = io::random_stable_system(3, 300 + i);
    const auto ss = solve_steady_state(p);
    EXPECT_GE(lmi_certify(p, ss).min_eig, -1e-7);
    EXPECT_LT(lmi_certificate_at(p, ss, ss.lambda_bar - 0.1).min_eig, -1e-4);
  }
}

TEST(Lqr, ScalarClosedForm) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 0, 1, 1.0, 0.0);
  EXPECT_NEAR(lqr_baseline(p)(0, 0), (0.2 + std::sqrt(0.84)) / 2, 1e-10);
  EXPECT_NEAR(lqr_baseline(p)(0, 0), oracle::scalar_dare(1, 1, 0.2, 1), 1e-10);
}

TEST(Lqr, TrivialCases) {
  const Problem stable = scalar_problem(0.5, 1, 1, 0.0, 1, 0, 1, 1.0, 0.0);
  EXPECT_EQ(lqr_baseline(stable)(0, 0), 0.0);
  Rng rng(52);
  const Problem r = testing_support::random_problem(rng, testing_support::Shape{3, 2, 1, 1});
  const Problem zero(MatrixXd::Zero(3, 3), r.B(), r.G(), r.Q(), r.R(), r.Pf(), r.schedule(), r.x0());
  EXPECT_LE((lqr_baseline(zero) - r.Q()).norm(), 1e-14);
}

}  // namespace
