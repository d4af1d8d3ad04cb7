// Copyright 2026 The gmmclass Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GMMCLASS_LINALG_HPP_
#define GMMCLASS_LINALG_HPP_

#include <cmath>
#include <string>

#include "gmmclass/common.hpp"

namespace gmmclass {

// Eigenpairs of a symmetric matrix, eigenvalues non-increasing; column i of
// `eigenvectors` pairs with eigenvalues(i).
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;
};

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kMinReciprocalCondition = 1e-12;
inline constexpr double kSingularUpdateTolerance = 1e-12;

inline bool is_symmetric(const Matrix& a, double rel_tol = kSymmetryTolerance) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.norm();
  return (a - a.transpose()).norm() <= rel_tol * (scale > 0.0 ? scale : 1.0);
}

inline SpectralDecomposition eig_sym(const Matrix& a) {
  require(a.rows() == a.cols(), "eig_sym: matrix is not square");
  require(is_symmetric(a), "eig_sym: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw NumericalError("eig_sym: eigensolver did not converge");
  // Eigen orders ascending.
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

// Cholesky factorization of an SPD matrix that refuses indefinite, singular
// or numerically ill-conditioned input instead of returning garbage.
class SpdSolver {
 public:
  explicit SpdSolver(const Matrix& a) {
    require(a.rows() == a.cols(), "spd_solve: matrix is not square");
    require(is_symmetric(a), "spd_solve: matrix is not symmetric");
    llt_.compute(a);
    if (llt_.info() != Eigen::Success) throw NumericalError("spd_solve: matrix is not positive definite");
    rcond_ = llt_.rcond();
    if (!(rcond_ >= kMinReciprocalCondition))
      throw NumericalError("spd_solve: matrix is ill-conditioned (rcond " + std::to_string(rcond_) + ")");
  }

  template <typename Rhs>
  Matrix solve(const Eigen::MatrixBase<Rhs>& b) const {
    require(b.rows() == llt_.rows(), "spd_solve: right-hand side has wrong length");
    return llt_.solve(b);
  }

  Vector solve(const Vector& b) const {
    require(b.size() == llt_.rows(), "spd_solve: right-hand side has wrong length");
    return llt_.solve(b);
  }

  Matrix inverse() const { return llt_.solve(Matrix::Identity(llt_.rows(), llt_.cols())); }

  // Estimate of 1 / cond_1(A).
  double rcond() const { return rcond_; }
  Index size() const { return llt_.rows(); }

 private:
  Eigen::LLT<Matrix> llt_;
  double rcond_ = 0.0;
};

inline Vector spd_solve(const Matrix& a, const Vector& b) { return SpdSolver(a).solve(b); }

// W'W, exactly symmetric.
inline Matrix gram_matrix(const Matrix& w) {
  Matrix gram = Matrix::Zero(w.cols(), w.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(w.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  return gram;
}

namespace detail {

struct Rank2Scalars {
  double uau;  // u' A^{-1} u
  double vav;  // v' A^{-1} v
  double uav;  // u' A^{-1} v
  double det;
};

inline Rank2Scalars rank2_scalars(const Vector& u, const Vector& v, const Vector& ainv_u, const Vector& ainv_v) {
  Rank2Scalars s{};
  s.uau = u.dot(ainv_u);
  s.vav = v.dot(ainv_v);
  s.uav = u.dot(ainv_v);
  const double t1 = (1.0 - s.vav) * s.uau;
  const double t2 = (1.0 + s.uav) * (1.0 + s.uav);
  s.det = t1 + t2;
  if (std::abs(s.det) < kSingularUpdateTolerance * (1.0 + std::abs(t1) + std::abs(t2)))
    throw NumericalError("rank-2 update: uu'+uv'+vu'+A is singular");
  return s;
}

}  // namespace detail

// Inverse of uu' + uv' + vu' + A from A^{-1}, by Woodbury with U = (u v),
// C = [[1, 1], [1, 0]].
inline Matrix rank2_inverse(const Matrix& a_inv, const Vector& u, const Vector& v) {
  require(a_inv.rows() == a_inv.cols(), "rank2_inverse: A^{-1} is not square");
  require(u.size() == a_inv.rows() && v.size() == a_inv.rows(), "rank2_inverse: dimension mismatch");
  require(is_symmetric(a_inv, 1e-10), "rank2_inverse: A^{-1} is not symmetric");
  const Vector x = a_inv * u;
  const Vector y = a_inv * v;
  const auto s = detail::rank2_scalars(u, v, x, y);
  const Matrix xy = x * y.transpose();
  const Matrix correction = (1.0 - s.vav) * (x * x.transpose()) + (1.0 + s.uav) * (xy + xy.transpose()) -
                            s.uau * (y * y.transpose());
  return a_inv - correction / s.det;
}

enum class Rank2Side { kU, kV };

// (uu' + uv' + vu' + A)^{-1} u  or  ...^{-1} v, for SPD A, without forming
// any inverse.
inline Vector rank2_apply(const Matrix& a, const Vector& u, const Vector& v, Rank2Side side) {
  require(u.size() == a.rows() && v.size() == a.rows(), "rank2_apply: dimension mismatch");
  const SpdSolver solver(a);
  const Vector x = solver.solve(u);
  const Vector y = solver.solve(v);
  const auto s = detail::rank2_scalars(u, v, x, y);
  if (side == Rank2Side::kU) return (x * (1.0 + s.uav) - y * s.uau) / s.det;
  return (y * (1.0 + s.uav + s.uau) - x * (s.uav + s.vav)) / s.det;
}

// e_i' G^{-1} w for a Gram matrix G = W'W, through the Schur complement of
// the (i, i) entry:
//   (w_i - G_{i,-i} G_{-i,-i}^{-1} w_{-i}) / (G_ii - G_{i,-i} G_{-i,-i}^{-1} G_{-i,i}).
inline double loo_row_inverse_gram(const Matrix& gram, const Vector& omega, Index i) {
  const Index n = gram.rows();
  require(gram.cols() == n && omega.size() == n, "loo_row_inverse: dimension mismatch");
  require(i >= 0 && i < n, "loo_row_inverse: index out of range");
  const double gii = gram(i, i);
  if (n == 1) {
    if (!(gii > 0.0)) throw NumericalError("loo_row_inverse: zero column");
    return omega(0) / gii;
  }
  Matrix rest(n - 1, n - 1);
  Vector cross(n - 1);
  Vector omega_rest(n - 1);
  for (Index r = 0, rr = 0; r < n; ++r) {
    if (r == i) continue;
    cross(rr) = gram(i, r);
    omega_rest(rr) = omega(r);
    for (Index c = 0, cc = 0; c < n; ++c) {
      if (c == i) continue;
      rest(rr, cc++) = gram(r, c);
    }
    ++rr;
  }
  Eigen::LLT<Matrix> llt(rest);
  if (llt.info() != Eigen::Success || !(llt.rcond() >= kMinReciprocalCondition))
    throw NumericalError("loo_row_inverse: remaining columns are rank deficient");
  const Vector coef = llt.solve(cross);  // (W~'W~)^{-1} W~' W_i
  const double denom = gii - cross.dot(coef);
  if (!(denom > kSingularUpdateTolerance * gii)) throw NumericalError("loo_row_inverse: column is collinear with the others");
  return (omega(i) - coef.dot(omega_rest)) / denom;
}

// e_1' (W'W)^{-1} w for a tall full-rank W (p > n).
inline double loo_row_inverse(const Matrix& w, const Vector& omega) {
  require(w.rows() > w.cols(), "loo_row_inverse: requires p > n");
  require(w.cols() >= 1 && omega.size() == w.cols(), "loo_row_inverse: dimension mismatch");
  return loo_row_inverse_gram(gram_matrix(w), omega, 0);
}

}  // namespace gmmclass

#endif  // GMMCLASS_LINALG_HPP_
