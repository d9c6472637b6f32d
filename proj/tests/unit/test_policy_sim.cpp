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

#include "random_problems.hpp"
#include "stdar/policy_sim.hpp"

namespace {

using namespace stdar;
using testing_support::Rng;
using testing_support::scalar_problem;

Problem policy_system(int N, double x0) { return scalar_problem(0.5, 1, 1, 0.25, 1, 0, N, 0.05, x0); }

TEST(Control, ZeroState) {
  Rng rng(40);
  const Problem p = testing_support::random_problem(rng, testing_support::Shape{3, 2, 1, 4});
  const VectorXd x = VectorXd::Zero(3);
  const auto sol = solve_multipliers(p, x);
  EXPECT_EQ(control_at(p, x, 0, sol.lam_star).norm(), 0.0);
}

TEST(Control, MatchesSingleStageMinmax) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 1, 1, 1.0, 1.0);
  const auto sol = solve_multipliers(p, p.x0());
  BlockSaddle<double> bs;
  bs.M11 = MatrixXd::Constant(1, 1, 2.0);  // R + B'PfB
  bs.M12 = MatrixXd::Constant(1, 1, 1.0);
  bs.M22 = MatrixXd::Constant(1, 1, 1.0);
  bs.d1 = VectorXd::Constant(1, 1.0);
  bs.d2 = VectorXd::Constant(1, 1.0);
  const auto mm = solve_constrained_minmax(bs);
  const VectorXd u = control_at(p, p.x0(), 0, sol.lam_star);
  EXPECT_NEAR(u(0), mm.u0(0), 1e-7);
  const VectorXd w = worst_disturbance_at(p, p.x0(), 0, sol.lam_star, u);
  EXPECT_NEAR(w(0), mm.w0(0), 1e-7);
}

TEST(Control, PolicyIsNonlinear) {
  const Problem p = policy_system(20, 0.0);
  double gap = 0;
  for (double x : {0.1, 0.5, 1.0}) {
    const VectorXd x1 = VectorXd::Constant(1, x), x3 = VectorXd::Constant(1, 3 * x);
    const VectorXd u1 = control_at(p, x1, 0, solve_multipliers(p, x1).lam_star);
    const VectorXd u3 = control_at(p, x3, 0, solve_multipliers(p, x3).lam_star);
    gap = std::max(gap, std::abs(u3(0) - 3 * u1(0)));
  }
  EXPECT_GT(gap, 1e-6);
}

TEST(Disturbance, OnTheSphere) {
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    const auto shape = testing_support::random_shape(rng, 3, 4);
    const Problem p = testing_support::random_problem(rng, shape);
    const auto sol = solve_multipliers(p, p.x0());
    const VectorXd u = control_from_sweep(sol.sweep, p.x0());
    const VectorXd w = disturbance_from_sweep(p, sol.sweep, p.x0(), u);
    EXPECT_NEAR(w.squaredNorm(), p.schedule().alpha(0), 1e-8);
  }
}

TEST(Disturbance, ZeroStateCanonicalCompletion) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 1, 1, 0.25, 0.0);
  const auto sol = solve_multipliers(p, p.x0());
  const VectorXd w = worst_disturbance_at(p, p.x0(), 0, sol.lam_star, VectorXd(VectorXd::Zero(1)));
  EXPECT_NEAR(w(0), 0.5, 1e-14);
}

TEST(Rollout, ZeroModeFromOrigin) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 1, 3, 1.0, 0.0);
  const auto tr = rollout(p, DisturbanceMode::kZero);
  for (const auto& x : tr.x) EXPECT_EQ(x.norm(), 0.0);
  EXPECT_EQ(tr.total_cost, 0.0);
  EXPECT_TRUE(std::isnan(tr.ratio()));
}

TEST(Rollout, WorstCaseRatioIsGameValue) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 1, 2, 1.0, 1.0);
  const auto sol = solve_multipliers(p, p.x0());
  const auto tr = rollout(p, DisturbanceMode::kWorstCase);
  EXPECT_NEAR(tr.ratio(), sol.value, 1e-6);
  EXPECT_TRUE(tr.all_converged);
}

TEST(Rollout, WorstCaseDominatesExternal) {
  Rng rng(42);
  for (int i = 0; i < 10; ++i) {
    const auto shape = testing_support::random_shape(rng, 3, 5);
    const Problem p = testing_support::random_problem(rng, shape);
    std::vector<VectorXd> ext;
    for (int k = 0; k < shape.N; ++k) {
      VectorXd w = rng.gaussian(shape.q);
      ext.push_back(w * (0.5 * std::sqrt(p.schedule().alpha(k)) / w.norm()));
    }
    const auto tr = rollout(p, DisturbanceMode::kExternal, ext);
    const double value = solve_multipliers(p, p.x0()).value;
    EXPECT_LE(tr.total_cost, value * p.schedule().alpha_bar() * (1 + 1e-9));
  }
}

TEST(Rollout, RejectsOversizedDisturbance) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 1, 2, 1.0, 1.0);
  const std::vector<VectorXd> ext{VectorXd::Constant(1, 0.5), VectorXd::Constant(1, 1.1)};
  try {
    rollout(p, DisturbanceMode::kExternal, ext);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDisturbanceOutOfBounds);
  }
}

TEST(Rollout, TrajectoryInvariants) {
  Rng rng(43);
  for (int i = 0; i < 10; ++i) {
    const auto shape = testing_support::random_shape(rng, 3, 5);
    const Problem p = testing_support::random_problem(rng, shape);
    const auto tr = rollout(p, DisturbanceMode::kWorstCase);
    ASSERT_EQ(tr.horizon(), shape.N);
    const double abar = p.schedule().alpha_bar();
    for (int k = 0; k < shape.N; ++k) {
      EXPECT_EQ((tr.x[k + 1] - (p.A() * tr.x[k] + p.B() * tr.u[k] + p.G() * tr.w[k])).norm(), 0.0);
      EXPECT_NEAR(tr.w[k].squaredNorm(), p.schedule().alpha(k), 1e-8);
      const double next = k + 1 < shape.N ? tr.value[k + 1] : tr.terminal_cost / abar;
      EXPECT_NEAR(tr.value[k], tr.stage_cost[k] / abar + next, 1e-6 * (1 + tr.value[k]));
    }
  }
}

TEST(Saddle, StageLagrangianInequalities) {
  Rng rng(44);
  for (int i = 0; i < 10; ++i) {
    const auto shape = testing_support::random_shape(rng, 3, 4);
    const Problem p = testing_support::random_problem(rng, shape);
    const auto sol = solve_multipliers(p, p.x0());
    const auto& sw = sol.sweep;
    const VectorXd& x = p.x0();
    const VectorXd u = control_from_sweep(sw, x);
    const VectorXd wbar = -(sw.J(0) * x);
    const double L0 = stage_lagrangian(p, sw, 0, x, u, wbar);
    for (int t = 0; t < 100; ++t) {
      const VectorXd du = rng.gaussian(shape.m) * rng.uniform(0.0, 2.0);
      const VectorXd dw = rng.gaussian(shape.q) * rng.uniform(0.0, 2.0);
      EXPECT_LE(stage_lagrangian(p, sw, 0, x, u, VectorXd(wbar + dw)), L0 + 1e-8);
      EXPECT_GE(stage_lagrangian(p, sw, 0, x, VectorXd(u + du), wbar), L0 - 1e-8);
    }
  }
}

}  // namespace
