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
#include "stdar/core_types.hpp"

namespace {

using namespace stdar;
using testing_support::scalar_problem;

TEST(Validation, ScalarExamplePasses) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 1, 1, 1.0, 0.0);
  const auto report = validate_problem(p);
  EXPECT_TRUE(report.all_passed());
}

TEST(Validation, RangeInclusionFailsWithZeroB) {
  const Problem p = scalar_problem(1, 0, 1, 0.2, 1, 1, 1, 1.0, 0.0);
  try {
    validate_problem(p);
    FAIL() << "expected AssumptionViolated";
  } catch (const AssumptionViolated& e) {
    EXPECT_EQ(e.which(), Assumption::kRangeInclusion);
  }
}

TEST(Validation, ZeroTerminalRequiresFlag) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 0, 1, 1.0, 0.0);
  try {
    validate_problem(p);
    FAIL() << "expected AssumptionViolated";
  } catch (const AssumptionViolated& e) {
    EXPECT_EQ(e.which(), Assumption::kTerminalCurvature);
  }
  ValidationOptions opts;
  opts.allow_degenerate_terminal = true;
  EXPECT_NO_THROW(validate_problem(p, Tol{}, opts));
}

TEST(Validation, DeterministicAndPure) {
  testing_support::Rng rng(5);
  const Problem p = testing_support::random_problem(rng, testing_support::Shape{3, 2, 1, 4});
  const auto a = evaluate_assumptions(p, Tol{});
  const auto b = evaluate_assumptions(p, Tol{});
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    EXPECT_EQ(a.checks[i].passed, b.checks[i].passed);
    EXPECT_EQ(a.checks[i].measure, b.checks[i].measure);
  }
}

TEST(ProblemData, RejectsBadDimensions) {
  auto c = [](double v) { return MatrixXd::Constant(1, 1, v); };
  EXPECT_THROW(Problem(c(1), MatrixXd::Ones(2, 1), c(1), c(1), c(1), c(1), StageBoundSchedule<double>::constant(1, 1),
                       VectorXd::Zero(1)),
               Error);
  EXPECT_THROW(Problem(c(1), c(1), c(1), c(1), c(1), c(1), StageBoundSchedule<double>::constant(1, 1),
                       VectorXd::Zero(2)),
               Error);
}

TEST(ProblemData, RejectsAsymmetricWeight) {
  MatrixXd Q(2, 2);
  Q << 1, 0.5, 0, 1;
  const MatrixXd I = MatrixXd::Identity(2, 2);
  EXPECT_THROW(Problem(I, I, I, Q, I, I, StageBoundSchedule<double>::constant(2, 1), VectorXd::Zero(2)), Error);
}

TEST(Schedule, SuffixSumsAndAverage) {
  const StageBoundSchedule<double> s(Eigen::Vector3d(1, 2, 3));
  EXPECT_EQ(s.horizon(), 3);
  EXPECT_DOUBLE_EQ(s.alpha_bar(), 6.0);
  EXPECT_DOUBLE_EQ(s.suffix_sum(1), 5.0);
  EXPECT_DOUBLE_EQ(s.tail(2)(0), 3.0);
  EXPECT_DOUBLE_EQ(s.suffix_sum(3), 0.0);
  EXPECT_THROW(StageBoundSchedule<double>(Eigen::Vector2d(1, -1)), Error);
}

TEST(Costs, StageAndTerminal) {
  const Problem p = scalar_problem(1, 1, 1, 0.2, 1, 2, 1, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(stage_cost(p, VectorXd::Constant(1, 2.0), VectorXd::Constant(1, 1.0)), 0.5 * (0.8 + 1.0));
  EXPECT_DOUBLE_EQ(terminal_cost(p, VectorXd::Constant(1, 3.0)), 9.0);
}

}  // namespace
