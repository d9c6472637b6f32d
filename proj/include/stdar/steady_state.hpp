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

// Steady state: the smallest constant multiplier l for which the Riccati map
//
//   T_l(Pi) = Q + A'Pi A - b' M(l, Pi)^-1 b
//
// has a fixed point reachable from Pf with l >= |G' Pi G|. Bisection over l;
// each feasibility test finds the fixed point by structure-preserving
// doubling (T^(2^k) in k steps) or by plain iteration.

#pragma once

#include <cmath>
#include <limits>

#include "stdar/core_types.hpp"
#include "stdar/riccati.hpp"

namespace stdar {

enum class FixedPointMethod { kDoubling, kIteration };

template <typename Scalar>
struct SteadyStateOptions {
  FixedPointMethod method = FixedPointMethod::kDoubling;
  Scalar rel_gap = Scalar(1e-13);   // bisection stops at (hi - lo) <= rel_gap * hi
  Scalar abs_gap = Scalar(1e-13);
  int max_doublings = 64;
  int max_iterations = 100000;      // plain iteration
  Scalar damping = Scalar(0.5);     // used once the residual stops decreasing
  int max_bracket_doublings = 10;
};

template <typename Scalar>
struct FixedPoint {
  bool feasible = false;
  Matrix<Scalar> Pi;
  Scalar residual = std::numeric_limits<Scalar>::infinity();
  int iterations = 0;
};

template <typename Scalar>
struct SteadyStateSolution {
  Scalar lambda_bar = 0;
  Matrix<Scalar> Pi_bar;
  Matrix<Scalar> K_bar;      // u = -K_bar x
  Scalar residual = 0;       // |T(Pi_bar) - Pi_bar|
  Scalar boundary_gap = 0;   // lambda_bar - |G' Pi_bar G|
  Scalar lambda_infeasible = 0;  // largest tested infeasible multiplier
  int bisection_steps = 0;
};

/// T_l(Pi) as one Riccati step with constant multiplier.
template <typename Scalar>
Matrix<Scalar> steady_map(const ProblemData<Scalar>& p, const Matrix<Scalar>& Pi, Scalar lambda,
                          const Tolerances<Scalar>& tol = {}) {
  return riccati_step(p, Pi, lambda, tol).Pi;
}

namespace detail {

template <typename Scalar>
bool finite(const Matrix<Scalar>& m) {
  return m.allFinite();
}

// Accepts Pi as the fixed point of T_l: finite, PSD, l above the floor and
// a small one-step residual.
template <typename Scalar>
void certify_fixed_point(const ProblemData<Scalar>& p, Scalar lambda, const Tolerances<Scalar>& tol,
                         FixedPoint<Scalar>& fp) {
  fp.feasible = false;
  if (!finite(fp.Pi)) return;
  const Scalar scale = Scalar(1) + fp.Pi.norm();
  if (min_sym_eig(fp.Pi) < -tol.tol_psd * scale) return;
  if (lambda < multiplier_floor(p, fp.Pi) - Scalar(1e-12) * scale) return;
  try {
    const Matrix<Scalar> next = steady_map(p, fp.Pi, lambda, tol);
    fp.residual = (next - fp.Pi).norm();
  } catch (const Error&) {
    return;
  }
  fp.feasible = fp.residual <= Scalar(1e-8) * scale;
}

template <typename Scalar>
FixedPoint<Scalar> doubling_fixed_point(const ProblemData<Scalar>& p, Scalar lambda,
                                        const Matrix<Scalar>& start, const Tolerances<Scalar>& tol,
                                        const SteadyStateOptions<Scalar>& opts) {
  const Eigen::Index n = p.n();
  const Matrix<Scalar> I = Matrix<Scalar>::Identity(n, n);
  FixedPoint<Scalar> fp;
  // T(X) = H + A'X (I + G X)^-1 A with G = B R^-1 B' - G G' / l, H = Q.
  Matrix<Scalar> Ak = p.A();
  Matrix<Scalar> Gk = symmetrize(Matrix<Scalar>(p.B() * p.R().llt().solve(p.B().transpose()) -
                                                p.G() * p.G().transpose() / lambda));
  Matrix<Scalar> Hk = p.Q();
  auto apply = [&](const Matrix<Scalar>& X) -> Matrix<Scalar> {
    // T^(2^k)(X) = H_k + A_k' X (I + G_k X)^-1 A_k.
    Eigen::PartialPivLU<Matrix<Scalar>> lu(I + Gk * X);
    return symmetrize(Matrix<Scalar>(Hk + Ak.transpose() * X * lu.solve(Ak)));
  };
  const bool from_start = start.norm() > 0;
  bool settled = false;
  Matrix<Scalar> prev = from_start ? apply(start) : Hk;
  for (int k = 0; k < opts.max_doublings; ++k) {
    Eigen::PartialPivLU<Matrix<Scalar>> lu(I + Gk * Hk);
    if (!(std::abs(lu.determinant()) > Scalar(0)) || !std::isfinite(lu.determinant())) return fp;
    const Matrix<Scalar> W = lu.solve(Ak);             // (I + G H)^-1 A
    const Matrix<Scalar> V = lu.solve(Matrix<Scalar>(Gk));  // (I + G H)^-1 G
    const Matrix<Scalar> Anext = Ak * W;
    const Matrix<Scalar> Gnext = symmetrize(Matrix<Scalar>(Gk + Ak * V * Ak.transpose()));
    const Matrix<Scalar> Hnext = symmetrize(Matrix<Scalar>(Hk + Ak.transpose() * Hk * W));
    Ak = Anext;
    Gk = Gnext;
    Hk = Hnext;
    fp.iterations = k + 1;
    if (!Hk.allFinite() || !Gk.allFinite() || !Ak.allFinite()) return fp;
    const Matrix<Scalar> cur = from_start ? apply(start) : Hk;
    if (!cur.allFinite()) return fp;
    const Scalar change = (cur - prev).norm();
    prev = cur;
    // Near a tangency the map has unit slope, so a small one-step residual
    // proves nothing; the doubled sequence itself has to settle.
    if (change <= std::numeric_limits<Scalar>::epsilon() * Scalar(16) * (Scalar(1) + cur.norm())) {
      settled = true;
      break;
    }
  }
  if (!settled) {
    fp.Pi = prev;
    return fp;
  }
  fp.Pi = prev;
  certify_fixed_point(p, lambda, tol, fp);
  return fp;
}

template <typename Scalar>
FixedPoint<Scalar> iterate_fixed_point(const ProblemData<Scalar>& p, Scalar lambda,
                                       const Matrix<Scalar>& start, const Tolerances<Scalar>& tol,
                                       const SteadyStateOptions<Scalar>& opts) {
  FixedPoint<Scalar> fp;
  Matrix<Scalar> Pi = start;
  Scalar beta = 1;
  Scalar last = std::numeric_limits<Scalar>::infinity();
  for (int it = 0; it < opts.max_iterations; ++it) {
    Matrix<Scalar> next;
    try {
      next = steady_map(p, Pi, lambda, tol);
    } catch (const Error&) {
      fp.iterations = it;
      return fp;
    }
    const Scalar res = (next - Pi).norm();
    if (!std::isfinite(res)) return fp;
    if (res > last) beta = opts.damping;
    last = res;
    Pi = symmetrize(Matrix<Scalar>((Scalar(1) - beta) * Pi + beta * next));
    fp.iterations = it + 1;
    if (res <= tol.tol_residual * (Scalar(1) + Pi.norm())) break;
  }
  fp.Pi = Pi;
  certify_fixed_point(p, lambda, tol, fp);
  return fp;
}

}  // namespace detail

/// Fixed point of T_l started from Pf (or from 0 when Pf already violates
/// the multiplier bound at l).
template <typename Scalar>
FixedPoint<Scalar> steady_fixed_point(const ProblemData<Scalar>& p, Scalar lambda,
                                      const Tolerances<Scalar>& tol = {},
                                      const SteadyStateOptions<Scalar>& opts = {}) {
  if (!(lambda > Scalar(0))) return FixedPoint<Scalar>{};
  Matrix<Scalar> start = p.Pf();
  if (multiplier_floor(p, start) > lambda) start.setZero();
  return opts.method == FixedPointMethod::kDoubling
             ? detail::doubling_fixed_point(p, lambda, start, tol, opts)
             : detail::iterate_fixed_point(p, lambda, start, tol, opts);
}

template <typename Scalar>
SteadyStateSolution<Scalar> solve_steady_state(const ProblemData<Scalar>& p,
                                               const Tolerances<Scalar>& tol = {},
                                               const SteadyStateOptions<Scalar>& opts = {}) {
  Scalar lo = 0;
  Scalar hi = Scalar(10) * (multiplier_floor(p, p.Pf()) + p.Q().trace() + p.R().trace());
  if (!(hi > 0)) hi = 1;
  FixedPoint<Scalar> best = steady_fixed_point(p, hi, tol, opts);
  int grow = 0;
  while (!best.feasible) {
    if (++grow > opts.max_bracket_doublings) {
      throw Error(ErrorCode::kNoFeasibleLambda, "no feasible multiplier up to " + std::to_string(double(hi)));
    }
    lo = hi;
    hi *= 2;
    best = steady_fixed_point(p, hi, tol, opts);
  }
  SteadyStateSolution<Scalar> sol;
  while (hi - lo > std::max(opts.abs_gap, opts.rel_gap * hi)) {
    const Scalar mid = Scalar(0.5) * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    FixedPoint<Scalar> fp = steady_fixed_point(p, mid, tol, opts);
    if (fp.feasible) {
      hi = mid;
      best = std::move(fp);
    } else {
      lo = mid;
    }
    ++sol.bisection_steps;
  }
  sol.lambda_bar = hi;
  sol.lambda_infeasible = lo;
  sol.Pi_bar = best.Pi;
  const auto st = riccati_step(p, best.Pi, hi, tol);
  sol.K_bar = st.K;
  sol.residual = (st.Pi - best.Pi).norm();
  sol.boundary_gap = hi - multiplier_floor(p, best.Pi);
  return sol;
}

template <typename Scalar>
struct LmiCertificate {
  Matrix<Scalar> P;  // Pi_bar^-1
  Matrix<Scalar> F;  // K_bar P
  Scalar lambda = 0;
  Matrix<Scalar> matrix;
  Scalar min_eig = 0;
};

/// The four-block matrix in (P, F, l):
///
///   [ P         (AP - BF)'  0     C' ]      C = [ Q^1/2 P  ]
///   [ AP - BF   P           G     0  ]          [ -R^1/2 F ]
///   [ 0         G'          l I   0  ]
///   [ C         0           0     I  ]
template <typename Scalar>
Matrix<Scalar> assemble_lmi(const ProblemData<Scalar>& p, const Matrix<Scalar>& P,
                            const Matrix<Scalar>& F, Scalar lambda) {
  const Eigen::Index n = p.n(), m = p.m(), q = p.q();
  const Matrix<Scalar> AP = p.A() * P - p.B() * F;
  Matrix<Scalar> C(n + m, n);
  C << psd_sqrt(p.Q()) * P, -(psd_sqrt(p.R()) * F);
  const Eigen::Index dim = 2 * n + q + n + m;
  Matrix<Scalar> L = Matrix<Scalar>::Zero(dim, dim);
  L.block(0, 0, n, n) = P;
  L.block(0, n, n, n) = AP.transpose();
  L.block(0, 2 * n + q, n, n + m) = C.transpose();
  L.block(n, 0, n, n) = AP;
  L.block(n, n, n, n) = P;
  L.block(n, 2 * n, n, q) = p.G();
  L.block(2 * n, n, q, n) = p.G().transpose();
  L.block(2 * n, 2 * n, q, q) = lambda * Matrix<Scalar>::Identity(q, q);
  L.block(2 * n + q, 0, n + m, n) = C;
  L.block(2 * n + q, 2 * n + q, n + m, n + m) = Matrix<Scalar>::Identity(n + m, n + m);
  return L;
}

/// Certificate built from (Pi_bar, K_bar) with an arbitrary multiplier;
/// lmi_certify uses lambda_bar.
template <typename Scalar>
LmiCertificate<Scalar> lmi_certificate_at(const ProblemData<Scalar>& p, const SteadyStateSolution<Scalar>& sol,
                                          Scalar lambda, const Tolerances<Scalar>& tol = {}) {
  const Scalar scale = Scalar(1) + sol.Pi_bar.norm();
  if (min_sym_eig(sol.Pi_bar) <= tol.tol_psd * scale) {
    throw Error(ErrorCode::kSingularPi, "steady-state Pi is not positive definite");
  }
  LmiCertificate<Scalar> cert;
  cert.P = sol.Pi_bar.llt().solve(Matrix<Scalar>::Identity(p.n(), p.n()));
  cert.P = symmetrize(cert.P);
  cert.F = sol.K_bar * cert.P;
  cert.lambda = lambda;
  cert.matrix = assemble_lmi(p, cert.P, cert.F, cert.lambda);
  cert.min_eig = min_sym_eig(cert.matrix);
  return cert;
}

template <typename Scalar>
LmiCertificate<Scalar> lmi_certify(const ProblemData<Scalar>& p, const SteadyStateSolution<Scalar>& sol,
                                   const Tolerances<Scalar>& tol = {}) {
  return lmi_certificate_at(p, sol, sol.lambda_bar, tol);
}

/// Fixed point of the disturbance-free Riccati map from Pf.
template <typename Scalar>
Matrix<Scalar> lqr_baseline(const ProblemData<Scalar>& p, Scalar tol = Scalar(1e-12),
                            int max_iterations = 1000000) {
  Matrix<Scalar> P = p.Pf();
  for (int it = 0; it < max_iterations; ++it) {
    const Matrix<Scalar> H = p.R() + p.B().transpose() * P * p.B();
    const Matrix<Scalar> b = p.B().transpose() * P * p.A();
    const Matrix<Scalar> next =
        symmetrize(Matrix<Scalar>(p.Q() + p.A().transpose() * P * p.A() - b.transpose() * H.llt().solve(b)));
    const Scalar res = (next - P).norm();
    P = next;
    if (!P.allFinite()) break;
    if (res <= tol * (Scalar(1) + P.norm())) return P;
  }
  throw Error(ErrorCode::kDiverged, "LQR Riccati iteration did not converge");
}

}  // namespace stdar
