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

// Small dense kernels shared by the solvers: symmetric eigen helpers,
// pseudoinverses, PSD square roots and nullspace extraction.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace stdar {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

/// Relative singular-value cutoff used by every pseudoinverse.
template <typename Scalar>
constexpr Scalar kPinvCutoff = Scalar(1e-11);

template <typename Derived>
Matrix<typename Derived::Scalar> symmetrize(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.transpose()) / typename Derived::Scalar(2);
}

template <typename Derived>
typename Derived::Scalar asymmetry(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.transpose()).norm();
}

/// Eigenvalues (ascending) of the symmetric part of m.
template <typename Derived>
Vector<typename Derived::Scalar> sym_eigenvalues(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() == 0) return Vector<Scalar>();
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

template <typename Derived>
typename Derived::Scalar max_sym_eig(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() == 0) return Scalar(0);
  if (m.rows() == 1) return m(0, 0);
  return sym_eigenvalues(m).maxCoeff();
}

template <typename Derived>
typename Derived::Scalar min_sym_eig(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() == 0) return Scalar(0);
  if (m.rows() == 1) return m(0, 0);
  return sym_eigenvalues(m).minCoeff();
}

/// Induced 2-norm.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Scalar(0);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(m);
  return svd.singularValues()(0);
}

template <typename Derived>
typename Derived::Scalar min_singular_value(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Scalar(0);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

/// Moore-Penrose pseudoinverse; singular values below cutoff * sigma_max are
/// treated as zero.
template <typename Derived>
Matrix<typename Derived::Scalar> pinv(
    const Eigen::MatrixBase<Derived>& m,
    typename Derived::Scalar cutoff = kPinvCutoff<typename Derived::Scalar>) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Matrix<Scalar>::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const Scalar floor = cutoff * s(0);
  Vector<Scalar> inv = Vector<Scalar>::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > floor && s(i) > Scalar(0)) inv(i) = Scalar(1) / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

template <typename Derived>
Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& m,
                            typename Derived::Scalar rel_tol) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(m);
  const auto& s = svd.singularValues();
  const Scalar floor = rel_tol * std::max(Scalar(1), s(0));
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > floor ? 1 : 0;
  return r;
}

/// Symmetric PSD square root; negative eigenvalues from roundoff are clipped.
template <typename Derived>
Matrix<typename Derived::Scalar> psd_sqrt(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(symmetrize(m));
  Vector<Scalar> root = es.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

/// Orthonormal basis of the numerical nullspace of m (columns).
template <typename Derived>
Matrix<typename Derived::Scalar> nullspace(const Eigen::MatrixBase<Derived>& m,
                                           typename Derived::Scalar rel_tol) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index cols = m.cols();
  if (cols == 0) return Matrix<Scalar>(0, 0);
  if (m.rows() == 0) return Matrix<Scalar>::Identity(cols, cols);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const Scalar floor = rel_tol * std::max(Scalar(1), s(0));
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s(i) > floor ? 1 : 0;
  return svd.matrixV().rightCols(cols - rank);
}

}  // namespace stdar
