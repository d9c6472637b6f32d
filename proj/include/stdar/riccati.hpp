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

// Backward Riccati sweep parameterized by the multiplier vector
// lambda_k..lambda_{N-1}. One step, with P = Pi_{j+1}:
//
//   M_j = [B'PB + R   B'PG          ]    M_j [K_j; J_j] = [B'PA; G'PA]
//         [G'PB       G'PG - l_j I  ]
//
//   Pi_j = Q + A'PA - [B'PA; G'PA]' [K_j; J_j]
//
// with u = -K_j x and w_bar = -J_j x. The feasible set requires
// l_j >= |G' Pi_{j+1} G| at every stage; it is nested, not a box.

#pragma once

#include <type_traits>
#include <vector>

#include "stdar/core_types.hpp"
#include "stdar/errors.hpp"
#include "stdar/linalg.hpp"

namespace stdar {

/// lambda_k, ..., lambda_{N-1}; entry i is the multiplier of stage k + i.
template <typename Scalar>
struct MultiplierVector {
  Vector<Scalar> lambdas;
  int stage_offset = 0;

  int size() const { return static_cast<int>(lambdas.size()); }
  /// Multiplier of absolute stage j.
  Scalar at(int j) const { return lambdas(j - stage_offset); }
};

template <typename Scalar>
struct RiccatiStep {
  Matrix<Scalar> Pi;  // Pi_j
  Matrix<Scalar> M;   // M_j
  Matrix<Scalar> K;   // m x n
  Matrix<Scalar> J;   // q x n
};

/// Stage bound l_j >= top eigenvalue of G' Pi_{j+1} G.
template <typename Scalar>
Scalar multiplier_floor(const ProblemData<Scalar>& p, const Matrix<Scalar>& Pi_next) {
  return max_sym_eig(Matrix<Scalar>(p.G().transpose() * Pi_next * p.G()));
}

/// One backward step. M_j is quasi-definite on the feasible set, so it is
/// solved by block elimination: Cholesky of the (1,1) block, then Cholesky
/// of the negated Schur complement.
template <typename Scalar>
RiccatiStep<Scalar> riccati_step(const ProblemData<Scalar>& p, const Matrix<Scalar>& Pi_next,
                                 Scalar lambda, const Tolerances<Scalar>& tol = {}) {
  const auto& A = p.A();
  const auto& B = p.B();
  const auto& G = p.G();
  const Eigen::Index m = p.m(), q = p.q();

  const Matrix<Scalar> PB = Pi_next * B;
  const Matrix<Scalar> PG = Pi_next * G;
  const Matrix<Scalar> PA = Pi_next * A;
  const Matrix<Scalar> M11 = symmetrize(Matrix<Scalar>(B.transpose() * PB + p.R()));
  const Matrix<Scalar> M12 = B.transpose() * PG;
  const Matrix<Scalar> GPG = symmetrize(Matrix<Scalar>(G.transpose() * PG));
  const Matrix<Scalar> M22 = GPG - lambda * Matrix<Scalar>::Identity(q, q);

  const Scalar floor = max_sym_eig(GPG);
  const Scalar scale = std::max(Scalar(1), std::abs(floor));
  if (!(lambda >= floor - tol.tol_psd * scale)) {
    throw Error(ErrorCode::kInfeasibleMultiplier,
                "lambda = " + std::to_string(double(lambda)) + " below |G'PiG| = " +
                    std::to_string(double(floor)));
  }

  const Matrix<Scalar> b1 = B.transpose() * PA;
  const Matrix<Scalar> b2 = G.transpose() * PA;

  Eigen::LLT<Matrix<Scalar>> l11(M11);
  if (l11.info() != Eigen::Success) throw Error(ErrorCode::kSingularM, "B'PiB + R is not positive definite");
  const Matrix<Scalar> X = l11.solve(M12);
  const Matrix<Scalar> negS = symmetrize(Matrix<Scalar>(M12.transpose() * X - M22));
  Eigen::LLT<Matrix<Scalar>> ls(negS);
  const Scalar s_scale = std::max(Scalar(1), negS.norm());
  if (ls.info() != Eigen::Success || min_sym_eig(negS) <= Scalar(1e-14) * s_scale) {
    throw Error(ErrorCode::kSingularM, "Schur complement of M_j is singular");
  }
  // J = S^-1 (b2 - M12' M11^-1 b1), K = M11^-1 (b1 - M12 J).
  const Matrix<Scalar> y1 = l11.solve(b1);
  RiccatiStep<Scalar> out;
  out.J = -ls.solve(Matrix<Scalar>(b2 - M12.transpose() * y1));
  out.K = l11.solve(Matrix<Scalar>(b1 - M12 * out.J));
  out.M.resize(m + q, m + q);
  out.M << M11, M12, M12.transpose(), M22;
  Matrix<Scalar> Pi = p.Q() + A.transpose() * PA - b1.transpose() * out.K - b2.transpose() * out.J;
  out.Pi = symmetrize(Pi);
  return out;
}

/// Per-stage record of a sweep from stage k to N. Accessors take absolute
/// stage indices: Pi(j) for j in [k, N], M/K/J(j) for j in [k, N).
template <typename Scalar>
struct RiccatiSweep {
  int k = 0;
  int N = 0;
  MultiplierVector<Scalar> lambda;
  std::vector<Matrix<Scalar>> Pis;  // Pis[j - k]
  std::vector<Matrix<Scalar>> Ms;
  std::vector<Matrix<Scalar>> Ks;
  std::vector<Matrix<Scalar>> Js;

  const Matrix<Scalar>& Pi(int j) const { return Pis[j - k]; }
  const Matrix<Scalar>& M(int j) const { return Ms[j - k]; }
  const Matrix<Scalar>& K(int j) const { return Ks[j - k]; }
  const Matrix<Scalar>& J(int j) const { return Js[j - k]; }
};

namespace detail {

template <typename Scalar>
RiccatiSweep<Scalar> empty_sweep(const ProblemData<Scalar>& p, int k) {
  const int N = p.horizon();
  if (k < 0 || k >= N) throw Error(ErrorCode::kInvalidArgument, "stage out of range");
  RiccatiSweep<Scalar> sw;
  sw.k = k;
  sw.N = N;
  const std::size_t len = static_cast<std::size_t>(N - k);
  sw.Pis.resize(len + 1);
  sw.Ms.resize(len);
  sw.Ks.resize(len);
  sw.Js.resize(len);
  sw.Pis[len] = p.Pf();
  sw.lambda.stage_offset = k;
  sw.lambda.lambdas.resize(N - k);
  return sw;
}

template <typename Scalar>
void store(RiccatiSweep<Scalar>& sw, int j, RiccatiStep<Scalar>&& st) {
  const std::size_t i = static_cast<std::size_t>(j - sw.k);
  sw.Pis[i] = std::move(st.Pi);
  sw.Ms[i] = std::move(st.M);
  sw.Ks[i] = std::move(st.K);
  sw.Js[i] = std::move(st.J);
}

}  // namespace detail

/// Backward sweep for a multiplier vector starting at stage lam.stage_offset.
template <typename Scalar>
RiccatiSweep<Scalar> sweep(const ProblemData<Scalar>& p, const MultiplierVector<Scalar>& lam,
                           const Tolerances<Scalar>& tol = {}) {
  const int k = lam.stage_offset;
  if (lam.size() != p.horizon() - k) {
    throw Error(ErrorCode::kDimensionMismatch, "multiplier vector length must be N - k");
  }
  RiccatiSweep<Scalar> sw = detail::empty_sweep(p, k);
  sw.lambda = lam;
  for (int j = p.horizon() - 1; j >= k; --j) {
    detail::store(sw, j, riccati_step(p, sw.Pi(j + 1), lam.at(j), tol));
  }
  return sw;
}

/// Sweep in slack coordinates: l_j = |G' Pi_{j+1} G| + s_j. Any s >= 0
/// yields a feasible multiplier vector, and the map is a bijection between
/// the nonnegative orthant and the feasible set.
template <typename Scalar>
RiccatiSweep<Scalar> sweep_from_slack(const ProblemData<Scalar>& p, const Vector<Scalar>& slack,
                                      int k, const Tolerances<Scalar>& tol = {}) {
  if (slack.size() != p.horizon() - k) {
    throw Error(ErrorCode::kDimensionMismatch, "slack vector length must be N - k");
  }
  RiccatiSweep<Scalar> sw = detail::empty_sweep(p, k);
  for (int j = p.horizon() - 1; j >= k; --j) {
    const Scalar l = multiplier_floor(p, sw.Pi(j + 1)) + slack(j - k);
    sw.lambda.lambdas(j - k) = l;
    detail::store(sw, j, riccati_step(p, sw.Pi(j + 1), l, tol));
  }
  return sw;
}

/// Redo stages j0, j0-1, ..., k of an existing slack sweep after slack
/// entries at stages <= j0 changed. Stages above j0 are reused.
template <typename Scalar>
void resweep_from_slack(const ProblemData<Scalar>& p, RiccatiSweep<Scalar>& sw,
                        const Vector<Scalar>& slack, int j0, const Tolerances<Scalar>& tol = {}) {
  for (int j = j0; j >= sw.k; --j) {
    const Scalar l = multiplier_floor(p, sw.Pi(j + 1)) + slack(j - sw.k);
    sw.lambda.lambdas(j - sw.k) = l;
    detail::store(sw, j, riccati_step(p, sw.Pi(j + 1), l, tol));
  }
}

/// Slack of each stage of a sweep: l_j - |G' Pi_{j+1} G|.
template <typename Scalar>
Vector<Scalar> slack_of(const ProblemData<Scalar>& p, const RiccatiSweep<Scalar>& sw) {
  Vector<Scalar> s(sw.N - sw.k);
  for (int j = sw.k; j < sw.N; ++j) s(j - sw.k) = sw.lambda.at(j) - multiplier_floor(p, sw.Pi(j + 1));
  return s;
}

/// Backward clip onto the feasible set with the given margin:
/// l_j <- max(l_j, |G' Pi_{j+1} G| + margin), Pi_{j+1} from the clipped tail.
template <typename Scalar>
MultiplierVector<Scalar> project_feasible(const ProblemData<Scalar>& p,
                                          const Vector<std::type_identity_t<Scalar>>& lam_raw,
                                          std::type_identity_t<Scalar> margin, int k = 0,
                                          const Tolerances<Scalar>& tol = {}) {
  if (lam_raw.size() != p.horizon() - k) {
    throw Error(ErrorCode::kDimensionMismatch, "multiplier vector length must be N - k");
  }
  MultiplierVector<Scalar> out{lam_raw, k};
  Matrix<Scalar> Pi = p.Pf();
  for (int j = p.horizon() - 1; j >= k; --j) {
    const Scalar floor = multiplier_floor(p, Pi) + margin;
    Scalar& l = out.lambdas(j - k);
    if (!(l >= floor)) l = floor;
    if (j > k) Pi = riccati_step(p, Pi, l, tol).Pi;
  }
  return out;
}

/// Largest Frobenius discrepancy between each Pi_j of the sweep and the
/// closed-loop form Qbar + Abar' P Abar - Abar' P G (G'PG - l I)^+ G' P Abar,
/// Abar = A - B K_j, Qbar = Q + K_j' R K_j, P = Pi_{j+1}.
template <typename Scalar>
Scalar receq_crosscheck(const RiccatiSweep<Scalar>& sw, const ProblemData<Scalar>& p) {
  Scalar worst = 0;
  const Eigen::Index q = p.q();
  for (int j = sw.k; j < sw.N; ++j) {
    const Matrix<Scalar>& P = sw.Pi(j + 1);
    const Matrix<Scalar>& K = sw.K(j);
    const Matrix<Scalar> Abar = p.A() - p.B() * K;
    const Matrix<Scalar> Qbar = p.Q() + K.transpose() * p.R() * K;
    const Matrix<Scalar> S = p.G().transpose() * P * p.G() - sw.lambda.at(j) * Matrix<Scalar>::Identity(q, q);
    const Matrix<Scalar> W = p.G().transpose() * P * Abar;
    const Matrix<Scalar> alt = Qbar + Abar.transpose() * P * Abar - W.transpose() * pinv(S) * W;
    worst = std::max(worst, Scalar((alt - sw.Pi(j)).norm()));
  }
  return worst;
}

/// Plain LQR backward recursion (no disturbance channel), Pi_N = Pf.
template <typename Scalar>
std::vector<Matrix<Scalar>> lqr_recursion(const ProblemData<Scalar>& p) {
  const int N = p.horizon();
  std::vector<Matrix<Scalar>> Pis(static_cast<std::size_t>(N + 1));
  Pis[N] = p.Pf();
  for (int j = N - 1; j >= 0; --j) {
    const Matrix<Scalar>& P = Pis[j + 1];
    const Matrix<Scalar> H = p.R() + p.B().transpose() * P * p.B();
    const Matrix<Scalar> b = p.B().transpose() * P * p.A();
    Pis[j] = symmetrize(Matrix<Scalar>(p.Q() + p.A().transpose() * P * p.A() - b.transpose() * H.llt().solve(b)));
  }
  return Pis;
}

}  // namespace stdar
