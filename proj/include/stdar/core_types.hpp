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

// Problem data for the stage-bound disturbance attenuation regulator:
//
//   x+ = A x + B u + G w,     |w_k|^2 <= alpha_k,
//   V  = sum_k (1/2)(x'Qx + u'Ru) + (1/2) x_N' Pf x_N,
//
// together with the shared numeric tolerances and the checks of the
// standing assumptions on (A, B, G, Q, R, Pf).

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "stdar/errors.hpp"
#include "stdar/linalg.hpp"

namespace stdar {

template <typename Scalar>
struct Tolerances {
  Scalar tol_psd = Scalar(1e-9);       // eigenvalue floor for PSD checks
  Scalar tol_residual = Scalar(1e-10); // Riccati / fixed-point residual
  Scalar tol_range = Scalar(1e-10);    // range-inclusion test
  Scalar tol_zero = Scalar(1e-12);     // nonzero-matrix test
  Scalar eps_boundary = Scalar(1e-9);  // margin kept above |G'PiG|
  Scalar fd_step = Scalar(1e-6);       // finite-difference step floor

  void check() const {
    for (Scalar t : {tol_psd, tol_residual, tol_range, tol_zero, eps_boundary, fd_step}) {
      if (!(t > Scalar(0))) {
        throw Error(ErrorCode::kInvalidArgument, "tolerances must be strictly positive");
      }
    }
  }
};

/// Per-stage disturbance bounds alpha_0..alpha_{N-1} and their sums.
template <typename Scalar>
class StageBoundSchedule {
 public:
  StageBoundSchedule() = default;

  explicit StageBoundSchedule(Vector<Scalar> alpha) : alpha_(std::move(alpha)) {
    if (alpha_.size() < 1) {
      throw AssumptionViolated(Assumption::kStageBounds, "horizon must be at least 1");
    }
    for (Eigen::Index k = 0; k < alpha_.size(); ++k) {
      if (!(alpha_(k) > Scalar(0))) {
        throw AssumptionViolated(Assumption::kStageBounds,
                                 "alpha_" + std::to_string(k) + " must be positive");
      }
    }
    suffix_.resize(alpha_.size() + 1);
    suffix_(alpha_.size()) = Scalar(0);
    for (Eigen::Index k = alpha_.size() - 1; k >= 0; --k) suffix_(k) = suffix_(k + 1) + alpha_(k);
  }

  static StageBoundSchedule constant(int horizon, Scalar alpha) {
    if (horizon < 1) {
      throw AssumptionViolated(Assumption::kStageBounds, "horizon must be at least 1");
    }
    return StageBoundSchedule(Vector<Scalar>::Constant(horizon, alpha));
  }

  int horizon() const { return static_cast<int>(alpha_.size()); }
  const Vector<Scalar>& alpha() const { return alpha_; }
  Scalar alpha(int k) const { return alpha_(k); }
  /// Full-horizon total, used as the fixed denominator at every stage.
  Scalar alpha_bar() const { return suffix_(0); }
  /// sum_{j >= k} alpha_j, with suffix_sum(N) = 0.
  Scalar suffix_sum(int k) const { return suffix_(k); }
  const Vector<Scalar>& suffix_sums() const { return suffix_; }
  /// alpha_k .. alpha_{N-1}.
  Vector<Scalar> tail(int k) const { return alpha_.tail(alpha_.size() - k); }

 private:
  Vector<Scalar> alpha_;
  Vector<Scalar> suffix_;
};

/// A complete problem instance. Dimensions are checked and the weights
/// symmetrized on construction; the object is immutable afterwards.
template <typename Scalar>
class ProblemData {
 public:
  using MatrixType = Matrix<Scalar>;
  using VectorType = Vector<Scalar>;

  ProblemData() = default;

  ProblemData(MatrixType A, MatrixType B, MatrixType G, MatrixType Q, MatrixType R,
              MatrixType Pf, StageBoundSchedule<Scalar> alpha, VectorType x0,
              const Tolerances<Scalar>& tol = {})
      : A_(std::move(A)), B_(std::move(B)), G_(std::move(G)), Q_(std::move(Q)),
        R_(std::move(R)), Pf_(std::move(Pf)), alpha_(std::move(alpha)), x0_(std::move(x0)) {
    const Eigen::Index n = A_.rows();
    auto require = [](bool ok, const std::string& what) {
      if (!ok) throw Error(ErrorCode::kDimensionMismatch, what);
    };
    require(n >= 1 && A_.cols() == n, "A must be square and non-empty");
    require(B_.rows() == n && B_.cols() >= 1, "B must have n rows");
    require(G_.rows() == n && G_.cols() >= 1, "G must have n rows");
    require(Q_.rows() == n && Q_.cols() == n, "Q must be n x n");
    require(R_.rows() == B_.cols() && R_.cols() == B_.cols(), "R must be m x m");
    require(Pf_.rows() == n && Pf_.cols() == n, "Pf must be n x n");
    require(x0_.size() == n, "x0 must have n entries");
    require(alpha_.horizon() >= 1, "alpha schedule is empty");
    symmetrize_weight(Q_, "Q", tol);
    symmetrize_weight(R_, "R", tol);
    symmetrize_weight(Pf_, "Pf", tol);
  }

  const MatrixType& A() const { return A_; }
  const MatrixType& B() const { return B_; }
  const MatrixType& G() const { return G_; }
  const MatrixType& Q() const { return Q_; }
  const MatrixType& R() const { return R_; }
  const MatrixType& Pf() const { return Pf_; }
  const VectorType& x0() const { return x0_; }
  const StageBoundSchedule<Scalar>& schedule() const { return alpha_; }

  int n() const { return static_cast<int>(A_.rows()); }
  int m() const { return static_cast<int>(B_.cols()); }
  int q() const { return static_cast<int>(G_.cols()); }
  int horizon() const { return alpha_.horizon(); }

  /// Same system with a different initial state.
  ProblemData with_initial_state(VectorType x0) const {
    ProblemData copy = *this;
    if (x0.size() != A_.rows()) throw Error(ErrorCode::kDimensionMismatch, "x0 must have n entries");
    copy.x0_ = std::move(x0);
    return copy;
  }

  /// Same system with a different stage-bound schedule (and horizon).
  ProblemData with_schedule(StageBoundSchedule<Scalar> alpha) const {
    ProblemData copy = *this;
    copy.alpha_ = std::move(alpha);
    return copy;
  }

 private:
  static void symmetrize_weight(MatrixType& m, const char* name, const Tolerances<Scalar>& tol) {
    const Scalar scale = std::max(Scalar(1), m.norm());
    if (asymmetry(m) > tol.tol_psd * scale) {
      throw AssumptionViolated(Assumption::kCostWeights, std::string(name) + " is not symmetric");
    }
    m = symmetrize(m);
  }

  MatrixType A_, B_, G_, Q_, R_, Pf_;
  StageBoundSchedule<Scalar> alpha_;
  VectorType x0_;
};

struct AssumptionCheck {
  Assumption which;
  bool passed = false;
  bool hard = false;  // a failed hard check makes the problem unusable
  double measure = 0; // the quantity compared against its threshold
  std::string detail;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;

  bool ok() const {
    for (const auto& c : checks) {
      if (c.hard && !c.passed) return false;
    }
    return true;
  }
  bool all_passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
  const AssumptionCheck* find(Assumption a) const {
    for (const auto& c : checks) {
      if (c.which == a) return &c;
    }
    return nullptr;
  }
};

struct ValidationOptions {
  /// Accept Pf with G'PfG = 0 (downgrades that check to a warning).
  bool allow_degenerate_terminal = false;
};

namespace detail {

// PBH test: rank [A - mu I, X] == n for every eigenvalue mu with |mu| >= 1.
// With transpose = true the test is on [A - mu I; X] (detectability).
template <typename Scalar>
bool pbh_unstable_modes_ok(const Matrix<Scalar>& A, const Matrix<Scalar>& X, bool transpose,
                           Scalar rel_tol) {
  using Complex = std::complex<Scalar>;
  using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = A.rows();
  Eigen::EigenSolver<Matrix<Scalar>> es(A, false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kNonConvergedEigen, "eigenvalues of A did not converge");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex mu = es.eigenvalues()(i);
    if (std::abs(mu) < Scalar(1) - rel_tol) continue;
    CMatrix shifted = A.template cast<Complex>() - mu * CMatrix::Identity(n, n);
    CMatrix stacked;
    if (transpose) {
      stacked.resize(n + X.rows(), n);
      stacked << shifted, X.template cast<Complex>();
    } else {
      stacked.resize(n, n + X.cols());
      stacked << shifted, X.template cast<Complex>();
    }
    Eigen::JacobiSVD<CMatrix> svd(stacked);
    const auto& s = svd.singularValues();
    const Scalar floor = Scalar(1e-9) * std::max(Scalar(1), s(0));
    Eigen::Index rank = 0;
    for (Eigen::Index j = 0; j < s.size(); ++j) rank += s(j) > floor ? 1 : 0;
    if (rank < n) return false;
  }
  return true;
}

}  // namespace detail

/// Evaluates every standing assumption without throwing.
template <typename Scalar>
ValidationReport evaluate_assumptions(const ProblemData<Scalar>& p, const Tolerances<Scalar>& tol = {},
                                      const ValidationOptions& opts = {}) {
  tol.check();
  ValidationReport report;
  auto add = [&](Assumption a, bool passed, bool hard, Scalar measure, std::string detail) {
    report.checks.push_back({a, passed, hard, static_cast<double>(measure), std::move(detail)});
  };

  const Scalar q_min = min_sym_eig(p.Q());
  const Scalar r_min = min_sym_eig(p.R());
  const Scalar pf_min = min_sym_eig(p.Pf());
  const Scalar weight_min = std::min({q_min, r_min, pf_min});
  const bool weights_ok = q_min >= -tol.tol_psd && pf_min >= -tol.tol_psd && r_min > tol.tol_psd;
  add(Assumption::kCostWeights, weights_ok, true, weight_min,
      "min eig Q=" + std::to_string(double(q_min)) + ", R=" + std::to_string(double(r_min)) +
          ", Pf=" + std::to_string(double(pf_min)));

  const Scalar alpha_min = p.schedule().alpha().minCoeff();
  add(Assumption::kStageBounds, alpha_min > Scalar(0) && p.horizon() >= 1, true, alpha_min,
      "N=" + std::to_string(p.horizon()));

  const bool stab = detail::pbh_unstable_modes_ok<Scalar>(p.A(), p.B(), false, Scalar(1e-12));
  const bool detect = detail::pbh_unstable_modes_ok<Scalar>(p.A(), p.Q(), true, Scalar(1e-12));
  add(Assumption::kStabilizability, stab && detect, false, Scalar(stab && detect ? 1 : 0),
      std::string(stab ? "stabilizable" : "not stabilizable") + ", " +
          (detect ? "detectable" : "not detectable"));

  const Matrix<Scalar> residual_map =
      Matrix<Scalar>::Identity(p.n(), p.n()) - p.B() * pinv(p.B());
  const Scalar range_gap = spectral_norm(Matrix<Scalar>(residual_map * p.G()));
  const Scalar range_thresh = tol.tol_range * std::max(Scalar(1), spectral_norm(p.G()));
  add(Assumption::kRangeInclusion, range_gap <= range_thresh, true, range_gap,
      "|(I - BB+)G| = " + std::to_string(double(range_gap)));

  const Scalar terminal = spectral_norm(Matrix<Scalar>(p.G().transpose() * p.Pf() * p.G()));
  const bool terminal_ok = terminal > tol.tol_zero;
  add(Assumption::kTerminalCurvature, terminal_ok, !opts.allow_degenerate_terminal, terminal,
      terminal_ok ? "|G'PfG| = " + std::to_string(double(terminal))
                  : std::string(opts.allow_degenerate_terminal
                                    ? "G'PfG = 0 accepted (degenerate terminal)"
                                    : "G'PfG = 0"));

  const bool positive = q_min > tol.tol_psd && pf_min > tol.tol_psd;
  add(Assumption::kPositiveWeights, positive, false, std::min(q_min, pf_min),
      positive ? "Q, Pf positive definite" : "Q or Pf only semidefinite");
  return report;
}

/// Checks the standing assumptions and throws AssumptionViolated on the
/// first hard failure. Soft failures are returned in the report.
template <typename Scalar>
ValidationReport validate_problem(const ProblemData<Scalar>& p, const Tolerances<Scalar>& tol = {},
                                  const ValidationOptions& opts = {}) {
  ValidationReport report = evaluate_assumptions(p, tol, opts);
  for (const auto& c : report.checks) {
    if (c.hard && !c.passed) throw AssumptionViolated(c.which, c.detail);
  }
  return report;
}

/// Stage cost (1/2)(x'Qx + u'Ru).
template <typename Scalar, typename DX, typename DU>
Scalar stage_cost(const ProblemData<Scalar>& p, const Eigen::MatrixBase<DX>& x,
                  const Eigen::MatrixBase<DU>& u) {
  return Scalar(0.5) * (x.dot(p.Q() * x) + u.dot(p.R() * u));
}

template <typename Scalar, typename DX>
Scalar terminal_cost(const ProblemData<Scalar>& p, const Eigen::MatrixBase<DX>& x) {
  return Scalar(0.5) * x.dot(p.Pf() * x);
}

using Problem = ProblemData<double>;
using Tol = Tolerances<double>;

}  // namespace stdar
