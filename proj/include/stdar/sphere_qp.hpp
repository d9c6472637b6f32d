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

// Quadratic kernels on the sphere:
//
//   max_{|w| = r}  (1/2) w'Dw + w'd
//
// and the quadratic minmax with a sphere-constrained maximizer, built on the
// block matrix M(lambda) = [M11 M12; M12' M22 - lambda I].

#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "stdar/errors.hpp"
#include "stdar/linalg.hpp"

namespace stdar {

template <typename Scalar>
struct SphereQP {
  Matrix<Scalar> D;
  Vector<Scalar> d;
  Scalar radius = Scalar(1);
};

template <typename Scalar>
struct SphereQPSolution {
  Scalar lambda_P = 0;        // multiplier: (D - lambda_P I) w = -d
  Vector<Scalar> w_star;      // representative maximizer, |w_star| = radius
  Matrix<Scalar> null_basis;  // hard case: the maximizers are w_bar + span(null_basis) on the sphere
  Vector<Scalar> w_bar;       // minimum-norm stationary part
  Scalar value = 0;
  bool boundary_case = false;  // lambda_P equals the top eigenvalue of D
};

namespace detail {

// Safeguarded Newton on psi(t) = 1/|w(t)| - 1 in the offset t = l - mu_max,
// w(t) = sum c_i/(t + gap_i) v_i with gap_i = mu_max - mu_i >= 0. Working in
// the offset keeps t accurate when the root hugs the top eigenvalue. psi is
// increasing and nearly linear; bisection takes over when Newton leaves the
// bracket.
template <typename Scalar>
Scalar secular_root(const Vector<Scalar>& gap, const Vector<Scalar>& c, Scalar lo, Scalar hi,
                    Scalar guess) {
  auto norm_w = [&](Scalar t, Scalar* dnorm) {
    Scalar s = 0, ds = 0;
    for (Eigen::Index i = 0; i < gap.size(); ++i) {
      const Scalar g = Scalar(1) / (t + gap(i));
      s += c(i) * c(i) * g * g;
      ds += Scalar(-2) * c(i) * c(i) * g * g * g;
    }
    const Scalar nw = std::sqrt(s);
    if (dnorm) *dnorm = ds / (Scalar(2) * nw);
    return nw;
  };
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar t = (guess > lo && guess < hi) ? guess : Scalar(0.5) * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    Scalar dn = 0;
    const Scalar nw = norm_w(t, &dn);
    const Scalar psi = Scalar(1) / nw - Scalar(1);
    if (psi > 0) {
      hi = t;
    } else {
      lo = t;
    }
    if (psi == 0) return t;
    const Scalar dpsi = -dn / (nw * nw);
    Scalar next = t - psi / dpsi;
    if (!(next > lo && next < hi)) next = Scalar(0.5) * (lo + hi);
    const Scalar step = std::abs(next - t);
    t = next;
    if (step <= Scalar(4) * eps * std::abs(t)) break;
    if (hi - lo <= Scalar(2) * eps * std::abs(t)) break;
  }
  return t;
}

}  // namespace detail

/// Largest real eigenvalue of P = [D I; dd' D]. Returns nullopt when P has
/// no real eigenvalue.
template <typename Scalar>
std::optional<Scalar> companion_lambda(const Matrix<Scalar>& D, const Vector<Scalar>& d) {
  const Eigen::Index q = D.rows();
  Matrix<Scalar> P(2 * q, 2 * q);
  P << D, Matrix<Scalar>::Identity(q, q), d * d.transpose(), D;
  Eigen::EigenSolver<Matrix<Scalar>> es(P, false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kNonConvergedEigen, "companion eigenproblem did not converge");
  }
  const Scalar scale = std::max(Scalar(1), P.norm());
  std::optional<Scalar> best;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) > Scalar(1e-7) * scale) continue;
    if (!best || ev.real() > *best) best = ev.real();
  }
  return best;
}

/// Maximizes (1/2) w'Dw + w'd over the sphere |w| = radius.
template <typename Scalar>
SphereQPSolution<Scalar> solve_sphere_qp(const SphereQP<Scalar>& qp) {
  const Eigen::Index q = qp.D.rows();
  if (qp.D.cols() != q || qp.d.size() != q || q == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "sphere QP needs square D and matching d");
  }
  if (!(qp.radius > Scalar(0))) throw Error(ErrorCode::kInvalidArgument, "radius must be positive");
  const Scalar r = qp.radius;
  const Matrix<Scalar> Du = symmetrize(qp.D) * (r * r);
  const Vector<Scalar> du = qp.d * r;
  const Scalar scale = std::max(Scalar(1), Du.norm() + du.norm());

  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(Du);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kNonConvergedEigen, "eigendecomposition of D failed");
  }
  const Vector<Scalar>& mu = es.eigenvalues();
  const Matrix<Scalar>& V = es.eigenvectors();
  const Scalar mu_max = mu(q - 1);
  const Vector<Scalar> c = V.transpose() * du;

  // Top eigenspace: eigenvalues within a relative cluster of mu_max.
  const Scalar cluster = Scalar(1e-10) * scale;
  Eigen::Index top = 0;
  for (Eigen::Index i = 0; i < q; ++i) top += (mu_max - mu(i) <= cluster) ? 1 : 0;

  // Hard-case certificate: d has no top-eigenspace component and the
  // minimum-norm stationary point fits inside the sphere.
  Scalar c_top2 = 0;
  for (Eigen::Index i = q - top; i < q; ++i) c_top2 += c(i) * c(i);
  Scalar bar2 = 0;
  for (Eigen::Index i = 0; i < q - top; ++i) {
    const Scalar g = c(i) / (mu_max - mu(i));
    bar2 += g * g;
  }
  const bool in_range = std::sqrt(c_top2) <= Scalar(1e-10) * scale;

  SphereQPSolution<Scalar> sol;
  Vector<Scalar> v(q);
  Scalar lam_u = 0;
  if (in_range && bar2 <= Scalar(1)) {
    sol.boundary_case = true;
    lam_u = mu_max;
    Vector<Scalar> coef = Vector<Scalar>::Zero(q);
    for (Eigen::Index i = 0; i < q - top; ++i) coef(i) = c(i) / (mu_max - mu(i));
    const Vector<Scalar> vbar = V * coef;
    Matrix<Scalar> basis = V.rightCols(top);
    // Completion along the first basis vector, signed toward +d; with no
    // preferred direction the largest entry is made positive.
    Vector<Scalar> nu = basis.col(0);
    const Scalar dir = nu.dot(du);
    if (dir < 0) {
      nu = -nu;
    } else if (dir == 0) {
      Eigen::Index imax = 0;
      nu.cwiseAbs().maxCoeff(&imax);
      if (nu(imax) < 0) nu = -nu;
    }
    const Scalar t = std::sqrt(std::max(Scalar(0), Scalar(1) - bar2));
    v = vbar + t * nu;
    sol.w_bar = vbar * r;
    sol.null_basis = basis;
  } else {
    const auto lam_p = companion_lambda<Scalar>(Du, du);
    // Secular bracket: |w(t)| <= |d| / t gives t <= |d|.
    const Vector<Scalar> gap = (Vector<Scalar>::Constant(q, mu_max) - mu).cwiseMax(Scalar(0));
    const Scalar hi = du.norm() * (Scalar(1) + Scalar(1e-12)) + std::numeric_limits<Scalar>::min();
    const Scalar guess = lam_p ? *lam_p - mu_max : Scalar(0.5) * hi;
    const Scalar t = detail::secular_root<Scalar>(gap, c, Scalar(0), hi, guess);
    lam_u = mu_max + t;
    Vector<Scalar> coef(q);
    for (Eigen::Index i = 0; i < q; ++i) coef(i) = c(i) / (t + gap(i));
    v = V * coef;
    const Scalar nv = v.norm();
    if (!(std::abs(nv - Scalar(1)) <= Scalar(1e-6))) {
      throw Error(ErrorCode::kInconsistentCase,
                  "secular equation did not reach the sphere (|w| = " + std::to_string(double(nv)) + ")");
    }
    v /= nv;
    sol.w_bar = v * r;
    sol.null_basis = Matrix<Scalar>(q, 0);
  }

  sol.w_star = v * r;
  sol.lambda_P = lam_u / (r * r);
  // value = (1/2) v'Du v + v'du evaluated directly at the representative.
  sol.value = Scalar(0.5) * v.dot(Du * v) + v.dot(du);
  return sol;
}

/// Dual function of the sphere QP: -(1/2) d'(D - lambda I)^+ d + lambda r^2 / 2.
template <typename Scalar>
Scalar sphere_dual(const SphereQP<Scalar>& qp, Scalar lambda) {
  const Eigen::Index q = qp.D.rows();
  const Matrix<Scalar> shifted = symmetrize(qp.D) - lambda * Matrix<Scalar>::Identity(q, q);
  return Scalar(-0.5) * qp.d.dot(pinv(shifted) * qp.d) + Scalar(0.5) * lambda * qp.radius * qp.radius;
}

template <typename Scalar>
struct BlockSaddle {
  Matrix<Scalar> M11;
  Matrix<Scalar> M12;
  Matrix<Scalar> M22;
  Vector<Scalar> d1;
  Vector<Scalar> d2;
  Scalar lambda = 0;

  Eigen::Index m() const { return M11.rows(); }
  Eigen::Index q() const { return M22.rows(); }

  void check() const {
    if (M11.rows() != M11.cols() || M22.rows() != M22.cols() || M12.rows() != M11.rows() ||
        M12.cols() != M22.rows() || d1.size() != M11.rows() || d2.size() != M22.rows()) {
      throw Error(ErrorCode::kDimensionMismatch, "inconsistent block saddle dimensions");
    }
  }

  /// M(lambda) = [M11 M12; M12' M22 - lambda I].
  Matrix<Scalar> assemble(Scalar lam) const {
    const Eigen::Index mm = m(), qq = q();
    Matrix<Scalar> M(mm + qq, mm + qq);
    M << M11, M12, M12.transpose(), M22 - lam * Matrix<Scalar>::Identity(qq, qq);
    return M;
  }
  Matrix<Scalar> assemble() const { return assemble(lambda); }

  Vector<Scalar> d() const {
    Vector<Scalar> out(d1.size() + d2.size());
    out << d1, d2;
    return out;
  }
};

template <typename Scalar>
struct SaddleSolution {
  Vector<Scalar> u_star;
  Vector<Scalar> w_star;
  Scalar L0 = 0;
};

/// Stationary point of L(u, w) = (1/2)[u;w]'M(lambda)[u;w] + d'[u;w] + lambda/2,
/// i.e. the minmax saddle for fixed lambda.
template <typename Scalar>
SaddleSolution<Scalar> saddle_point(const BlockSaddle<Scalar>& bs,
                                    Scalar eps_boundary = Scalar(1e-9),
                                    Scalar tol_residual = Scalar(1e-10)) {
  bs.check();
  const Scalar top = max_sym_eig(bs.M22);
  const Scalar scale = std::max(Scalar(1), std::abs(top));
  if (bs.lambda < top - eps_boundary * scale) {
    throw Error(ErrorCode::kNoSolution, "lambda below the top eigenvalue of M22: inner maximum is unbounded");
  }
  const Matrix<Scalar> M = bs.assemble();
  const Vector<Scalar> d = bs.d();
  const Matrix<Scalar> Mp = pinv(M);
  const Vector<Scalar> z = -(Mp * d);
  const Scalar res = (M * z + d).norm();
  const Scalar ref = tol_residual * std::max(Scalar(1), M.norm() * z.norm() + d.norm());
  if (res > std::max(ref, Scalar(1e-8) * std::max(Scalar(1), d.norm()))) {
    throw Error(ErrorCode::kRankDeficientD, "d is not in the range of M(lambda)");
  }
  SaddleSolution<Scalar> out;
  out.u_star = z.head(bs.m());
  out.w_star = z.tail(bs.q());
  out.L0 = Scalar(0.5) * d.dot(z) + Scalar(0.5) * bs.lambda;
  return out;
}

template <typename Scalar>
struct ConstrainedMinmax {
  Vector<Scalar> u0;
  Vector<Scalar> w0;
  Scalar lambda0 = 0;
  Scalar value = 0;
  bool boundary = false;  // lambda0 at the top eigenvalue of M22
};

/// min_u max_{|w| = 1} (1/2)[u;w]'M(0)[u;w] + d'[u;w] by minimizing the
/// convex dual L(lambda) = -(1/2)d'M(lambda)^+ d + lambda/2 over
/// lambda >= top eigenvalue of M22. The lambda field of bs is ignored.
template <typename Scalar>
ConstrainedMinmax<Scalar> solve_constrained_minmax(const BlockSaddle<Scalar>& bs) {
  bs.check();
  Eigen::LLT<Matrix<Scalar>> llt(bs.M11);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "M11 must be positive definite");
  }
  const Eigen::Index mm = bs.m();
  const Vector<Scalar> d = bs.d();
  const Scalar top = max_sym_eig(bs.M22);
  const Scalar scale = std::max(Scalar(1), std::abs(top) + bs.M12.norm() + bs.M11.norm());

  // w(lambda) from the Schur complement on the w block:
  // (M22 - lam I - M12' M11^-1 M12) w = M12' M11^-1 d1 - d2.
  const Matrix<Scalar> X = llt.solve(bs.M12);
  const Vector<Scalar> y = llt.solve(bs.d1);
  const Matrix<Scalar> S0 = symmetrize(bs.M22 - bs.M12.transpose() * X);
  const Vector<Scalar> rhs = bs.M12.transpose() * y - bs.d2;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(S0);
  const Vector<Scalar>& sig = es.eigenvalues();
  const Vector<Scalar> c = es.eigenvectors().transpose() * rhs;

  // |w(lam)|^2 = sum c_i^2 / (sig_i - lam)^2; the saddle needs |w| = 1 where
  // L'(lam) = (1 - |w|^2)/2 vanishes, or lam = top with |w| <= 1.
  auto w_norm2 = [&](Scalar lam) {
    Scalar s = 0;
    for (Eigen::Index i = 0; i < sig.size(); ++i) {
      const Scalar g = sig(i) - lam;
      if (g == 0) {
        if (c(i) != 0) return std::numeric_limits<Scalar>::infinity();
        continue;
      }
      s += c(i) * c(i) / (g * g);
    }
    return s;
  };
  // sig_max <= top (Schur complement subtracts a PSD term), so every
  // lam >= top keeps the reduced matrix negative semidefinite.
  const Scalar lo = top;
  ConstrainedMinmax<Scalar> out;
  auto finish = [&](Scalar lam) {
    const Matrix<Scalar> M = bs.assemble(lam);
    Vector<Scalar> z = -(pinv(M) * d);
    out.lambda0 = lam;
    out.u0 = z.head(mm);
    out.value = Scalar(0.5) * d.dot(z) + Scalar(0.5) * lam;
  };

  const Scalar n_lo = w_norm2(lo);
  if (n_lo <= Scalar(1)) {
    out.boundary = true;
    finish(lo);
  } else {
    Scalar hi = lo + std::max(Scalar(1e-12) * scale, Scalar(1));
    int doublings = 0;
    while (w_norm2(hi) > Scalar(1)) {
      hi = lo + Scalar(2) * (hi - lo);
      if (++doublings > 200) {
        throw Error(ErrorCode::kBracketingFailed, "dual derivative stays negative");
      }
    }
    // Root of 1/|w| - 1, increasing in lam: bisection with secant steps.
    Scalar a = lo, b = hi;
    auto psi = [&](Scalar lam) {
      const Scalar n2 = w_norm2(lam);
      return std::isinf(n2) ? Scalar(-1) : Scalar(1) / std::sqrt(n2) - Scalar(1);
    };
    Scalar fa = psi(a), fb = psi(b);
    int side = 0;
    for (int it = 0; it < 400 && (b - a) > Scalar(4) * std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), std::abs(b)); ++it) {
      Scalar m = (a * fb - b * fa) / (fb - fa);
      if (!(m > a && m < b)) m = Scalar(0.5) * (a + b);
      const Scalar fm = psi(m);
      if (fm == 0) { a = b = m; break; }
      if (fm < 0) {
        a = m; fa = fm;
        if (side == -1) fb *= Scalar(0.5);
        side = -1;
      } else {
        b = m; fb = fm;
        if (side == 1) fa *= Scalar(0.5);
        side = 1;
      }
    }
    finish(Scalar(0.5) * (a + b));
  }

  // The maximizer at u0 is the sphere QP on (M22, M12'u0 + d2).
  SphereQP<Scalar> inner{bs.M22, Vector<Scalar>(bs.M12.transpose() * out.u0 + bs.d2), Scalar(1)};
  const auto ws = solve_sphere_qp(inner);
  out.w0 = ws.w_star;
  // Value as the primal maximum at u0 (equals the dual value at lambda0).
  out.value = Scalar(0.5) * out.u0.dot(bs.M11 * out.u0) + out.u0.dot(bs.d1) + ws.value;
  return out;
}

/// True iff the symmetric block matrix [A B; B' D] with A > 0, D <= 0 is
/// nonsingular, decided as null(B) and null(D) intersecting trivially.
template <typename DA, typename DB, typename DD>
bool block_nonsingular(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DB>& B,
                       const Eigen::MatrixBase<DD>& D,
                       typename DA::Scalar rel_tol = typename DA::Scalar(1e-10)) {
  using Scalar = typename DA::Scalar;
  if (A.rows() != A.cols() || D.rows() != D.cols() || B.rows() != A.rows() || B.cols() != D.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "block_nonsingular: inconsistent blocks");
  }
  const Eigen::Index k = D.rows();
  if (k == 0) return true;
  Matrix<Scalar> stacked(B.rows() + D.rows(), k);
  stacked << B, D;
  return numerical_rank(stacked, rel_tol) == k;
}

}  // namespace stdar
