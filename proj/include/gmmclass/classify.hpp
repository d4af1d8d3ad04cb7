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

#ifndef GMMCLASS_CLASSIFY_HPP_
#define GMMCLASS_CLASSIFY_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gmmclass/common.hpp"
#include "gmmclass/linalg.hpp"
#include "gmmclass/mixture.hpp"
#include "gmmclass/spectra.hpp"

namespace gmmclass {

// Half-space classifier y -> sign(w'y), sign(0) = +1. Weights are never
// normalized; every consumer is invariant to positive rescaling.
class LinearClassifier {
 public:
  explicit LinearClassifier(Vector weights) : weights_(std::move(weights)) {
    require(weights_.size() >= 1, "LinearClassifier: empty weight vector");
    require(weights_.allFinite(), "LinearClassifier: non-finite weights");
    if (weights_.isZero(0.0)) throw NumericalError("LinearClassifier: weight vector is zero");
  }

  const Vector& weights() const { return weights_; }
  Index dim() const { return weights_.size(); }

 private:
  Vector weights_;
};

inline int predict(const LinearClassifier& c, const Vector& y) {
  require(y.size() == c.dim(), "predict: dimension mismatch");
  return c.weights().dot(y) >= 0.0 ? 1 : -1;
}

// w = sum_i eta_i Y_i
inline LinearClassifier averaging(const Dataset& data) {
  data.validate();
  return LinearClassifier(data.y * data.eta);
}

// w = Sigma^{-1} sum_i eta_i Y_i, with the true (oracle) covariance.
inline LinearClassifier lda(const Dataset& data, const CovarianceModel& covariance) {
  data.validate();
  require(covariance.dim() == data.dim(), "lda: covariance dimension mismatch");
  return LinearClassifier(covariance.apply_inverse(data.y * data.eta));
}

// Max over training points of |eta_i w'Y_i - 1| / (1 + ||w|| ||Y_i||).
inline double interpolation_residual(const Vector& w, const Dataset& data) {
  const Vector margins = (data.y.transpose() * w).cwiseProduct(data.eta);
  const double wn = w.norm();
  double worst = 0.0;
  for (Index i = 0; i < data.size(); ++i)
    worst = std::max(worst, std::abs(margins(i) - 1.0) / (1.0 + wn * data.y.col(i).norm()));
  return worst;
}

// Minimum-norm solution of eta_i w'Y_i = 1: w = Y (Y'Y)^{-1} eta.
inline LinearClassifier interpolator(const Dataset& data) {
  data.validate();
  require(data.dim() >= data.size(), "interpolator: requires p >= n");
  const SpdSolver gram(gram_matrix(data.y));
  return LinearClassifier(data.y * gram.solve(data.eta));
}

// w = (1/n) Y (ridge I_n + Y'Y/n)^{-1} eta, the dual form of ridge-regularized
// least squares on the labels. ridge = 0 is the minimum-norm interpolator and
// ridge = +inf the averaging classifier.
inline LinearClassifier ridge(const Dataset& data, double lambda) {
  require(lambda >= 0.0, "ridge: lambda must be >= 0");
  if (std::isinf(lambda)) return averaging(data);
  if (lambda == 0.0) return interpolator(data);
  data.validate();
  const double n = static_cast<double>(data.size());
  Matrix a = gram_matrix(data.y) / n;
  a.diagonal().array() += lambda;
  const SpdSolver solver(a);
  return LinearClassifier(data.y * solver.solve(data.eta) / n);
}

struct SvmOptions {
  double kkt_tolerance = 1e-8;
  long max_sweeps = 1'000'000;
  // Attempt an exact solve on the current support every this many sweeps.
  long polish_every = 64;
  // alpha_i * K_ii beyond this is taken as divergence (non-separable data).
  double divergence_cap = 1e12;
};

struct SvmResult {
  LinearClassifier classifier;
  Vector alpha;                 // dual coefficients, w = sum_i alpha_i eta_i Y_i
  double max_kkt_violation;     // in margin units
  double max_slackness;         // max_i |alpha_i (eta_i w'Y_i - 1)|
  double min_margin;            // min_i eta_i w'Y_i
  long sweeps;
  bool polished;
};

namespace detail {

// KKT residual for min 1/2 a'Ka - 1'a s.t. a >= 0, with g = Ka - 1.
inline double kkt_violation(const Vector& alpha, const Vector& g) {
  double worst = 0.0;
  for (Index i = 0; i < alpha.size(); ++i) worst = std::max(worst, alpha(i) > 0.0 ? std::abs(g(i)) : std::max(0.0, -g(i)));
  return worst;
}

// Solve K_SS a_S = 1 on the support of alpha. Returns false if the support
// solve fails or yields a non-positive coefficient.
inline bool polish_support(const Matrix& k, const Vector& alpha, Vector& out) {
  std::vector<Index> support;
  for (Index i = 0; i < alpha.size(); ++i)
    if (alpha(i) > 0.0) support.push_back(i);
  if (support.empty()) return false;
  const Index s = static_cast<Index>(support.size());
  Matrix kss(s, s);
  for (Index a = 0; a < s; ++a)
    for (Index b = 0; b < s; ++b) kss(a, b) = k(support[a], support[b]);
  Eigen::LLT<Matrix> llt(kss);
  if (llt.info() != Eigen::Success) return false;
  const Vector sol = llt.solve(Vector::Ones(s));
  if (!sol.allFinite() || (sol.array() <= 0.0).any()) return false;
  out = Vector::Zero(alpha.size());
  for (Index a = 0; a < s; ++a) out(support[a]) = sol(a);
  return true;
}

}  // namespace detail

// Hard-margin SVM, min ||w||^2 s.t. eta_i w'Y_i >= 1, by coordinate ascent on
// the dual  max sum(alpha) - 1/2 ||sum alpha_i eta_i Y_i||^2,  alpha >= 0.
inline SvmResult svm_hard(const Dataset& data, const SvmOptions& opt = {}) {
  data.validate();
  const Index n = data.size();
  Matrix k = gram_matrix(data.y);
  k = data.eta.asDiagonal() * k * data.eta.asDiagonal();
  for (Index i = 0; i < n; ++i)
    if (!(k(i, i) > 0.0)) throw NumericalError("svm_hard: zero observation");

  Vector alpha = Vector::Zero(n);
  Vector g = -Vector::Ones(n);  // K alpha - 1
  long sweeps = 0;
  bool polished = false;
  for (;;) {
    if (detail::kkt_violation(alpha, g) <= opt.kkt_tolerance) break;
    if (sweeps > 0 && sweeps % opt.polish_every == 0) {
      Vector candidate;
      if (detail::polish_support(k, alpha, candidate)) {
        const Vector gc = k * candidate - Vector::Ones(n);
        if (detail::kkt_violation(candidate, gc) <= opt.kkt_tolerance) {
          alpha = std::move(candidate);
          g = gc;
          polished = true;
          break;
        }
      }
    }
    if (sweeps >= opt.max_sweeps) throw NumericalError("svm_hard: no convergence within the sweep limit");
    for (Index i = 0; i < n; ++i) {
      const double updated = std::max(0.0, alpha(i) - g(i) / k(i, i));
      const double delta = updated - alpha(i);
      if (delta != 0.0) {
        alpha(i) = updated;
        g += delta * k.col(i);
      }
      if (alpha(i) * k(i, i) > opt.divergence_cap) throw NumericalError("svm_hard: dual diverges, data not separable");
    }
    ++sweeps;
    // Refresh the gradient to stop drift from accumulated rank-1 updates.
    if (sweeps % 1024 == 0) g = k * alpha - Vector::Ones(n);
  }

  Vector w = data.y * alpha.cwiseProduct(data.eta);
  const Vector margins = (data.y.transpose() * w).cwiseProduct(data.eta);
  double slack = 0.0;
  for (Index i = 0; i < n; ++i) slack = std::max(slack, std::abs(alpha(i) * (margins(i) - 1.0)));
  const double kkt = detail::kkt_violation(alpha, margins - Vector::Ones(n));
  const double min_margin = margins.minCoeff();
  return SvmResult{LinearClassifier(std::move(w)), std::move(alpha), kkt, slack, min_margin, sweeps, polished};
}

}  // namespace gmmclass

#endif  // GMMCLASS_CLASSIFY_HPP_
