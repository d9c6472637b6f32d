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

// The convex multiplier program
//
//   min  phi(l) = (x' Pi_k(l) x + sum_{j>=k} alpha_j l_j) / (2 abar)
//
// over the nested feasible set, abar = sum of all alpha_j (full horizon).
//
// The optimizer works in slack coordinates s_j = l_j - |G' Pi_{j+1} G|,
// where the feasible set becomes the orthant s >= margin and projection is
// a componentwise clip.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <type_traits>
#include <vector>

#include "stdar/core_types.hpp"
#include "stdar/riccati.hpp"

namespace stdar {

enum class GradientMethod {
  kFiniteDifference,  // central differences, one-sided near the boundary
  kEnvelope,          // (alpha_j - |J_j x_j|^2) / (2 abar) along the certainty trajectory
};

template <typename Scalar>
Scalar objective_from_sweep(const ProblemData<Scalar>& p, const RiccatiSweep<Scalar>& sw,
                            const Vector<Scalar>& x) {
  Scalar lin = 0;
  for (int j = sw.k; j < sw.N; ++j) lin += p.schedule().alpha(j) * sw.lambda.at(j);
  return (x.dot(sw.Pi(sw.k) * x) + lin) / (Scalar(2) * p.schedule().alpha_bar());
}

template <typename Scalar>
Scalar objective(const ProblemData<Scalar>& p, const MultiplierVector<Scalar>& lam,
                 const Vector<Scalar>& x, const Tolerances<Scalar>& tol = {}) {
  return objective_from_sweep(p, sweep(p, lam, tol), x);
}

/// Gradient from the sweep alone: the certainty trajectory
/// x_{j+1} = (A - B K_j - G J_j) x_j carries w_bar_j = -J_j x_j.
template <typename Scalar>
Vector<Scalar> envelope_gradient(const ProblemData<Scalar>& p, const RiccatiSweep<Scalar>& sw,
                                 const Vector<Scalar>& x) {
  Vector<Scalar> g(sw.N - sw.k);
  Vector<Scalar> xj = x;
  const Scalar den = Scalar(2) * p.schedule().alpha_bar();
  for (int j = sw.k; j < sw.N; ++j) {
    const Vector<Scalar> wbar = -(sw.J(j) * xj);
    g(j - sw.k) = (p.schedule().alpha(j) - wbar.squaredNorm()) / den;
    xj = p.A() * xj - p.B() * (sw.K(j) * xj) + p.G() * wbar;
  }
  return g;
}

namespace detail {

// Pi_k and the stage-k..j linear term after replacing l_j, with stages
// above j unchanged. Only stages j..k are recomputed.
template <typename Scalar>
Scalar phi_with_lambda(const ProblemData<Scalar>& p, const RiccatiSweep<Scalar>& sw, int j,
                       Scalar lj, const Vector<Scalar>& x, const Tolerances<Scalar>& tol) {
  Matrix<Scalar> Pi = sw.Pi(j + 1);
  Scalar lin = 0;
  for (int i = sw.N - 1; i > j; --i) lin += p.schedule().alpha(i) * sw.lambda.at(i);
  for (int i = j; i >= sw.k; --i) {
    const Scalar l = (i == j) ? lj : sw.lambda.at(i);
    lin += p.schedule().alpha(i) * l;
    Pi = riccati_step(p, Pi, l, tol).Pi;
  }
  return (x.dot(Pi * x) + lin) / (Scalar(2) * p.schedule().alpha_bar());
}

// Same in slack coordinates: stages below j recompute their floors, so the
// perturbation moves along the orthant coordinate.
template <typename Scalar>
Scalar phi_with_slack(const ProblemData<Scalar>& p, const RiccatiSweep<Scalar>& sw,
                      const Vector<Scalar>& s, int j, Scalar sj, const Vector<Scalar>& x,
                      const Tolerances<Scalar>& tol) {
  Matrix<Scalar> Pi = sw.Pi(j + 1);
  Scalar lin = 0;
  for (int i = sw.N - 1; i > j; --i) lin += p.schedule().alpha(i) * sw.lambda.at(i);
  for (int i = j; i >= sw.k; --i) {
    const Scalar l = multiplier_floor(p, Pi) + ((i == j) ? sj : s(i - sw.k));
    lin += p.schedule().alpha(i) * l;
    Pi = riccati_step(p, Pi, l, tol).Pi;
  }
  return (x.dot(Pi * x) + lin) / (Scalar(2) * p.schedule().alpha_bar());
}

template <typename Scalar>
Scalar fd_step_for(Scalar value, const Tolerances<Scalar>& tol) {
  return std::max(tol.fd_step, tol.fd_step * std::abs(value));
}

// Second-order forward difference from f0, f(h), f(2h).
template <typename Scalar>
Scalar forward_diff(Scalar f0, Scalar f1, Scalar f2, Scalar h) {
  return (Scalar(-3) * f0 + Scalar(4) * f1 - f2) / (Scalar(2) * h);
}

}  // namespace detail

/// Gradient in the slack coordinates at a slack sweep. Coordinates whose
/// backward perturbation would cross the margin use forward differences.
template <typename Scalar>
Vector<Scalar> slack_gradient(const ProblemData<Scalar>& p, const RiccatiSweep<Scalar>& sw,
                              const Vector<Scalar>& s, const Vector<Scalar>& x, Scalar margin,
                              const Tolerances<Scalar>& tol) {
  const int len = sw.N - sw.k;
  Vector<Scalar> g(len);
  const Scalar f0 = objective_from_sweep(p, sw, x);
  for (int i = 0; i < len; ++i) {
    const int j = sw.k + i;
    const Scalar h = detail::fd_step_for(sw.lambda.at(j), tol);
    const Scalar fp = detail::phi_with_slack(p, sw, s, j, s(i) + h, x, tol);
    if (s(i) - h >= margin) {
      const Scalar fm = detail::phi_with_slack(p, sw, s, j, s(i) - h, x, tol);
      g(i) = (fp - fm) / (Scalar(2) * h);
    } else {
      const Scalar f2 = detail::phi_with_slack(p, sw, s, j, s(i) + Scalar(2) * h, x, tol);
      g(i) = detail::forward_diff(f0, fp, f2, h);
    }
  }
  return g;
}

/// Partial derivatives with respect to l_k..l_{N-1}. The finite-difference
/// path needs every stage at least 10 fd steps inside its bound.
template <typename Scalar>
Vector<Scalar> gradient(const ProblemData<Scalar>& p, const MultiplierVector<Scalar>& lam,
                        const Vector<Scalar>& x, const Tolerances<Scalar>& tol = {},
                        GradientMethod method = GradientMethod::kFiniteDifference) {
  const RiccatiSweep<Scalar> sw = sweep(p, lam, tol);
  if (method == GradientMethod::kEnvelope) return envelope_gradient(p, sw, x);

  const Vector<Scalar> s = slack_of(p, sw);
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) < Scalar(10) * detail::fd_step_for(lam.lambdas(i), tol)) {
      throw Error(ErrorCode::kBoundaryTooClose,
                  "stage " + std::to_string(lam.stage_offset + i) + " is within 10 fd steps of its bound");
    }
  }
  const int len = lam.size();
  Vector<Scalar> g(len);
  const Scalar f0 = objective_from_sweep(p, sw, x);
  for (int i = 0; i < len; ++i) {
    const int j = lam.stage_offset + i;
    const Scalar lj = lam.lambdas(i);
    const Scalar h = detail::fd_step_for(lj, tol);
    const Scalar fp = detail::phi_with_lambda(p, sw, j, lj + h, x, tol);
    try {
      const Scalar fm = detail::phi_with_lambda(p, sw, j, lj - h, x, tol);
      g(i) = (fp - fm) / (Scalar(2) * h);
    } catch (const Error& e) {
      // Lowering l_j raises Pi_j and can push an earlier stage out.
      if (e.code() != ErrorCode::kInfeasibleMultiplier && e.code() != ErrorCode::kSingularM) throw;
      const Scalar f2 = detail::phi_with_lambda(p, sw, j, lj + Scalar(2) * h, x, tol);
      g(i) = detail::forward_diff(f0, fp, f2, h);
    }
  }
  return g;
}

template <typename Scalar>
struct MultiplierOptions {
  int max_iterations = 5000;
  Scalar gtol = Scalar(1e-8);  // on |P(s - g) - s| / (1 + |phi|)
  Scalar armijo_c = Scalar(1e-4);
  Scalar shrink = Scalar(0.5);
  Scalar initial_slack = Scalar(1);
};

template <typename Scalar>
struct MultiplierSolution {
  MultiplierVector<Scalar> lam_star;
  Vector<Scalar> slack;               // l_j - |G' Pi_{j+1} G|
  Scalar value = 0;                   // phi at lam_star
  Scalar grad_norm = 0;               // projected gradient norm in slack coordinates
  std::vector<bool> boundary_flags;   // slack within 10 eps_boundary
  int iterations = 0;
  bool converged = false;
  std::vector<Scalar> history;        // phi at the start and after each accepted step
  RiccatiSweep<Scalar> sweep;         // sweep at lam_star
};

/// Minimizes phi over the feasible multipliers of stages k..N-1 at state x.
/// init, when given, is a warm start in multiplier coordinates.
template <typename Scalar>
MultiplierSolution<Scalar> solve_multipliers(const ProblemData<Scalar>& p, const Vector<std::type_identity_t<Scalar>>& x,
                                             int k = 0,
                                             const std::optional<Vector<std::type_identity_t<Scalar>>>& init = std::nullopt,
                                             const Tolerances<Scalar>& tol = {},
                                             const MultiplierOptions<Scalar>& opts = {}) {
  if (x.size() != p.n()) throw Error(ErrorCode::kDimensionMismatch, "state must have n entries");
  const int len = p.horizon() - k;
  if (len < 1) throw Error(ErrorCode::kInvalidArgument, "stage out of range");
  const Scalar margin = tol.eps_boundary;

  Vector<Scalar> s;
  if (init) {
    const auto lam0 = project_feasible(p, *init, margin, k, tol);
    s = slack_of(p, sweep(p, lam0, tol)).cwiseMax(margin);
  } else {
    s = Vector<Scalar>::Constant(len, opts.initial_slack);
  }

  RiccatiSweep<Scalar> sw = sweep_from_slack(p, s, k, tol);
  Scalar f = objective_from_sweep(p, sw, x);
  Vector<Scalar> g = slack_gradient(p, sw, s, x, margin, tol);
  auto projected_norm = [&](const Vector<Scalar>& sv, const Vector<Scalar>& gv) {
    return Scalar(((sv - gv).cwiseMax(margin) - sv).norm());
  };

  MultiplierSolution<Scalar> out;
  out.history.push_back(f);
  Scalar pg = projected_norm(s, g);
  Scalar t = Scalar(1) / std::max(Scalar(1), g.template lpNorm<Eigen::Infinity>());
  int it = 0;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (; it < opts.max_iterations; ++it) {
    if (pg <= opts.gtol * (Scalar(1) + std::abs(f))) {
      out.converged = true;
      break;
    }
    bool accepted = false;
    Vector<Scalar> s_new;
    RiccatiSweep<Scalar> sw_new;
    Scalar f_new = f;
    for (int ls = 0; ls < 80; ++ls) {
      s_new = (s - t * g).cwiseMax(margin);
      const Vector<Scalar> step = s_new - s;
      if (step.norm() == 0) break;
      sw_new = sweep_from_slack(p, s_new, k, tol);
      f_new = objective_from_sweep(p, sw_new, x);
      // Roundoff allowance keeps the search from stalling on a flat floor.
      if (f_new <= f + opts.armijo_c * g.dot(step) + Scalar(8) * eps * std::abs(f)) {
        accepted = true;
        break;
      }
      t *= opts.shrink;
    }
    if (!accepted) break;
    const Vector<Scalar> g_new = slack_gradient(p, sw_new, s_new, x, margin, tol);
    const Vector<Scalar> ds = s_new - s;
    const Vector<Scalar> dg = g_new - g;
    const Scalar curv = ds.dot(dg);
    // Barzilai-Borwein step, clamped.
    t = curv > 0 ? ds.squaredNorm() / curv : t * Scalar(2);
    t = std::clamp(t, Scalar(1e-12), Scalar(1e12));
    s = s_new;
    sw = std::move(sw_new);
    f = f_new;
    out.history.push_back(f);
    g = g_new;
    pg = projected_norm(s, g);
  }
  if (!out.converged && pg <= opts.gtol * (Scalar(1) + std::abs(f))) out.converged = true;

  out.lam_star = sw.lambda;
  out.slack = s;
  out.value = objective_from_sweep(p, sw, x);
  out.grad_norm = pg;
  out.iterations = it;
  out.boundary_flags.resize(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i) out.boundary_flags[static_cast<std::size_t>(i)] = s(i) <= Scalar(10) * margin;
  out.sweep = std::move(sw);
  return out;
}

}  // namespace stdar
