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

// Online policy: at every stage re-solve the multiplier program from the
// observed state, apply u_k = -K_k x_k, and (optionally) let the worst-case
// disturbance respond on the sphere |w_k|^2 = alpha_k.

#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "stdar/core_types.hpp"
#include "stdar/multiplier_opt.hpp"
#include "stdar/riccati.hpp"
#include "stdar/sphere_qp.hpp"

namespace stdar {

template <typename Scalar>
Vector<Scalar> control_from_sweep(const RiccatiSweep<Scalar>& sw, const Vector<Scalar>& x) {
  return -(sw.K(sw.k) * x);
}

/// u_k = -K_k(lam_star) x. lam_star must start at stage k.
template <typename Scalar>
Vector<Scalar> control_at(const ProblemData<Scalar>& p, const Vector<Scalar>& x, int k,
                          const MultiplierVector<Scalar>& lam_star, const Tolerances<Scalar>& tol = {}) {
  if (lam_star.stage_offset != k) throw Error(ErrorCode::kInvalidArgument, "multipliers must start at stage k");
  return control_from_sweep(sweep(p, lam_star, tol), x);
}

/// Worst-case response to (x, u) at stage k: the maximizer of
/// (1/2) w'Dw + w'd on |w|^2 = alpha_k with D = G'Pi_{k+1}G,
/// d = G'Pi_{k+1}(Ax + Bu), Pi_{k+1} from the sweep at lam_star.
template <typename Scalar>
Vector<Scalar> disturbance_from_sweep(const ProblemData<Scalar>& p, const RiccatiSweep<Scalar>& sw,
                                      const Vector<Scalar>& x, const Vector<Scalar>& u,
                                      Scalar* multiplier = nullptr) {
  const int k = sw.k;
  const Matrix<Scalar>& Pn = sw.Pi(k + 1);
  const Scalar alpha = p.schedule().alpha(k);
  SphereQP<Scalar> qp;
  qp.D = symmetrize(Matrix<Scalar>(p.G().transpose() * Pn * p.G()));
  qp.d = p.G().transpose() * Pn * (p.A() * x + p.B() * u);
  qp.radius = std::sqrt(alpha);
  const auto sol = solve_sphere_qp(qp);

  // The unconstrained stationary point at lam_star should already sit on the
  // sphere (or inside it, at the boundary); a large overshoot with no
  // nullspace to absorb it means lam_star is not an optimum.
  const Scalar lam = sw.lambda.at(k);
  const Matrix<Scalar> S = qp.D - lam * Matrix<Scalar>::Identity(p.q(), p.q());
  const Vector<Scalar> wbar = -(pinv(S) * qp.d);
  if (wbar.squaredNorm() > alpha * Scalar(1.001) && nullspace(S, Scalar(1e-10)).cols() == 0 &&
      !sol.boundary_case) {
    const Scalar gap = std::abs(sol.lambda_P - lam) / std::max(Scalar(1), std::abs(lam));
    if (gap > Scalar(1e-3)) {
      throw Error(ErrorCode::kNoSphereIntersection,
                  "stationary disturbance leaves the sphere at stage " + std::to_string(k));
    }
  }
  if (multiplier) *multiplier = sol.lambda_P;
  return sol.w_star;
}

template <typename Scalar>
Vector<Scalar> worst_disturbance_at(const ProblemData<Scalar>& p, const Vector<Scalar>& x, int k,
                                    const MultiplierVector<Scalar>& lam_star, const Vector<Scalar>& u,
                                    const Tolerances<Scalar>& tol = {}) {
  if (lam_star.stage_offset != k) throw Error(ErrorCode::kInvalidArgument, "multipliers must start at stage k");
  return disturbance_from_sweep(p, sweep(p, lam_star, tol), x, u);
}

/// Stage-k Lagrangian with the tail collapsed into Pi_{k+1}:
/// (1/2)(x'Qx + u'Ru + x+' Pi_{k+1} x+) - (l_k/2)(|w|^2 - alpha_k).
template <typename Scalar>
Scalar stage_lagrangian(const ProblemData<Scalar>& p, const RiccatiSweep<Scalar>& sw, int k,
                        const Vector<Scalar>& x, const Vector<Scalar>& u, const Vector<Scalar>& w) {
  const Vector<Scalar> xn = p.A() * x + p.B() * u + p.G() * w;
  return stage_cost(p, x, u) + Scalar(0.5) * xn.dot(sw.Pi(k + 1) * xn) -
         Scalar(0.5) * sw.lambda.at(k) * (w.squaredNorm() - p.schedule().alpha(k));
}

enum class DisturbanceMode { kWorstCase, kExternal, kZero };

template <typename Scalar>
struct Trajectory {
  std::vector<Vector<Scalar>> x;  // x_0..x_N
  std::vector<Vector<Scalar>> u;  // u_0..u_{N-1}
  std::vector<Vector<Scalar>> w;
  std::vector<Scalar> lambda;     // head multiplier of each stage re-solve
  std::vector<Scalar> stage_cost;
  std::vector<Scalar> value;      // phi_k(x_k) of each re-solve
  std::vector<int> iterations;
  Scalar terminal_cost = 0;
  Scalar total_cost = 0;
  Scalar disturbance_energy = 0;  // sum |w_k|^2
  bool all_converged = true;

  /// V / sum |w_k|^2; NaN when no disturbance acted.
  Scalar ratio() const {
    return disturbance_energy > 0 ? total_cost / disturbance_energy
                                  : std::numeric_limits<Scalar>::quiet_NaN();
  }
  int horizon() const { return static_cast<int>(u.size()); }
};

/// Closed-loop run of the online policy from p.x0(). In kExternal mode the
/// disturbances come from `external` (one q-vector per stage).
template <typename Scalar>
Trajectory<Scalar> rollout(const ProblemData<Scalar>& p, DisturbanceMode mode,
                           const std::vector<Vector<Scalar>>& external = {},
                           const Tolerances<Scalar>& tol = {},
                           const MultiplierOptions<Scalar>& opts = {}) {
  const int N = p.horizon();
  if (mode == DisturbanceMode::kExternal) {
    if (static_cast<int>(external.size()) != N) {
      throw Error(ErrorCode::kDimensionMismatch, "external disturbance sequence must have N entries");
    }
    for (int k = 0; k < N; ++k) {
      if (external[k].size() != p.q()) throw Error(ErrorCode::kDimensionMismatch, "disturbance must have q entries");
      if (external[k].squaredNorm() > p.schedule().alpha(k) * (Scalar(1) + Scalar(1e-9))) {
        throw Error(ErrorCode::kDisturbanceOutOfBounds, "|w_" + std::to_string(k) + "|^2 exceeds alpha_k");
      }
    }
  }

  Trajectory<Scalar> tr;
  tr.x.push_back(p.x0());
  std::optional<Vector<Scalar>> warm;
  for (int k = 0; k < N; ++k) {
    const Vector<Scalar>& xk = tr.x.back();
    const auto sol = solve_multipliers(p, xk, k, warm, tol, opts);
    const RiccatiSweep<Scalar>& sw = sol.sweep;
    const Vector<Scalar> u = control_from_sweep(sw, xk);
    Vector<Scalar> w;
    switch (mode) {
      case DisturbanceMode::kWorstCase: w = disturbance_from_sweep(p, sw, xk, u); break;
      case DisturbanceMode::kExternal: w = external[k]; break;
      case DisturbanceMode::kZero: w = Vector<Scalar>::Zero(p.q()); break;
    }
    tr.u.push_back(u);
    tr.w.push_back(w);
    tr.lambda.push_back(sol.lam_star.lambdas(0));
    tr.value.push_back(sol.value);
    tr.iterations.push_back(sol.iterations);
    tr.all_converged = tr.all_converged && sol.converged;
    tr.stage_cost.push_back(stage_cost(p, xk, u));
    tr.disturbance_energy += w.squaredNorm();
    tr.x.push_back(p.A() * xk + p.B() * u + p.G() * w);
    if (k + 1 < N) warm = Vector<Scalar>(sol.lam_star.lambdas.tail(N - k - 1));
  }
  tr.terminal_cost = terminal_cost(p, tr.x.back());
  tr.total_cost = tr.terminal_cost;
  for (Scalar c : tr.stage_cost) tr.total_cost += c;
  return tr;
}

}  // namespace stdar
