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

#include "random_problems.hpp"
#include "stdar/riccati.hpp"

namespace {

using namespace stdar;
using testing_support::Rng;
using testing_support::scalar_problem;

MultiplierVector<double> constant_lambda(int len, double v, int k = 0) {
  return MultiplierVector<double>{VectorXd::Constant(len, v), k};
}

TEST(RiccatiStep, ScalarHandValue) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 1, 1, 1.0, 1.0);
  const auto st = riccati_step(p, p.Pf(), 2.0);
  EXPECT_NEAR(st.Pi(0, 0), 13.0 / 15.0, 1e-14);
  Eigen::Matrix2d M;
  M << 2, 1, 1, -1;
  EXPECT_NEAR((st.M - M).norm(), 0.0, 1e-14);
  // M [K; J] = [B'PA; G'PA] = [1; 1].
  EXPECT_NEAR(st.K(0, 0), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(st.J(0, 0), -1.0 / 3.0, 1e-14);
}

TEST(RiccatiStep, RejectsInfeasibleMultiplier) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 1, 1, 1.0, 1.0);
  try {
    riccati_step(p, p.Pf(), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasibleMultiplier);
  }
}

TEST(Sweep, ZeroDynamicsGiveStageWeight) {
  Rng rng(20);
  testing_support::Shape s{3, 2, 2, 4};
  const Problem base = testing_support::random_problem(rng, s);
  const Problem p(MatrixXd::Zero(3, 3), base.B(), base.G(), base.Q(), base.R(), base.Pf(), base.schedule(),
                  base.x0());
  const auto sw = testing_support::random_feasible_sweep(rng, p);
  for (int j = 0; j < 4; ++j) EXPECT_LE((sw.Pi(j) - p.Q()).norm(), 1e-14 * (1 + p.Q().norm()));
  EXPECT_LE(receq_crosscheck(sw, p), 1e-13);
}

TEST(Sweep, LargeMultipliersRecoverLqr) {
  Rng rng(21);
  for (int i = 0; i < 10; ++i) {
    const auto shape = testing_support::random_shape(rng, 3, 6);
    const Problem p = testing_support::random_problem(rng, shape);
    const auto sw = sweep(p, constant_lambda(shape.N, 1e8));
    const auto lqr = lqr_recursion(p);
    EXPECT_LE((sw.Pi(0) - lqr[0]).norm(), 1e-6 * lqr[0].norm());
  }
}

TEST(Sweep, StoresEveryStage) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 1, 5, 1.0, 1.0);
  const auto sw = sweep(p, constant_lambda(3, 5.0, 2));
  EXPECT_EQ(sw.k, 2);
  EXPECT_EQ(sw.N, 5);
  EXPECT_EQ(sw.Pis.size(), 4u);
  EXPECT_EQ(sw.Pi(5)(0, 0), 1.0);
  const auto st = riccati_step(p, sw.Pi(3), 5.0);
  EXPECT_EQ(st.Pi(0, 0), sw.Pi(2)(0, 0));
}

TEST(Sweep, SlackRoundTrip) {
  Rng rng(22);
  const Problem p = testing_support::random_problem(rng, testing_support::Shape{3, 2, 1, 5});
  const VectorXd s = (VectorXd(5) << 0.1, 0.5, 1.0, 2.0, 0.3).finished();
  const auto sw = sweep_from_slack(p, s, 0);
  EXPECT_LE((slack_of(p, sw) - s).norm(), 1e-12);
  const auto again = sweep(p, sw.lambda);
  EXPECT_LE((again.Pi(0) - sw.Pi(0)).norm(), 1e-14 * (1 + sw.Pi(0).norm()));
}

TEST(ProjectFeasible, ZerosSingleStage) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 1, 1, 1.0, 1.0);
  const auto lam = project_feasible(p, VectorXd::Zero(1), 1e-9);
  EXPECT_NEAR(lam.lambdas(0), 1.0 + 1e-9, 1e-15);
}

TEST(ProjectFeasible, ZerosTwoStage) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 1, 2, 1.0, 1.0);
  const double margin = 1e-6;
  const auto lam = project_feasible(p, VectorXd::Zero(2), margin);
  EXPECT_NEAR(lam.lambdas(1), 1.0 + margin, 1e-15);
  const double pi1 = riccati_step(p, p.Pf(), 1.0 + margin).Pi(0, 0);
  EXPECT_NEAR(lam.lambdas(0), pi1 + margin, 1e-12);
}

TEST(ProjectFeasible, Idempotent) {
  Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    const auto shape = testing_support::random_shape(rng, 3, 5);
    const Problem p = testing_support::random_problem(rng, shape);
    const auto sw = testing_support::random_feasible_sweep(rng, p);
    const auto lam = project_feasible(p, sw.lambda.lambdas, 1e-9);
    EXPECT_EQ(lam.lambdas, sw.lambda.lambdas);
    const auto twice = project_feasible(p, project_feasible(p, VectorXd::Zero(shape.N), 1e-9).lambdas, 1e-9);
    EXPECT_LE((twice.lambdas - project_feasible(p, VectorXd::Zero(shape.N), 1e-9).lambdas).norm(), 1e-14);
  }
}

TEST(Receq, ScalarCase) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 1, 1, 1.0, 1.0);
  EXPECT_LE(receq_crosscheck(sweep(p, constant_lambda(1, 2.0)), p), 1e-12);
}

TEST(Receq, RandomSweepsPsdAndNonsingular) {
  Rng rng(24);
  for (int i = 0; i < 200; ++i) {
    const auto shape = testing_support::random_shape(rng, 4, 6);
    const Problem p = testing_support::random_problem(rng, shape);
    const auto sw = testing_support::random_feasible_sweep(rng, p);
    EXPECT_LE(receq_crosscheck(sw, p), 1e-9 * (1 + sw.Pi(0).norm()));
    for (const auto& P : sw.Pis) EXPECT_GE(min_sym_eig(P), -1e-9);
    for (const auto& M : sw.Ms) EXPECT_GT(min_singular_value(M), 1e-12 * spectral_norm(M));
  }
}

TEST(MultiplierFloor, MonotoneInPi) {
  // Pi grows as lambda shrinks toward the floor.
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 1, 1, 1.0, 1.0);
  double prev = -1;
  for (double lam : {100.0, 10.0, 3.0, 1.5, 1.01}) {
    const double pi = riccati_step(p, p.Pf(), lam).Pi(0, 0);
    EXPECT_GT(pi, prev);
    prev = pi;
  }
}

}  // namespace
