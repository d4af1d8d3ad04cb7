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

#ifndef GMMCLASS_SVP_HPP_
#define GMMCLASS_SVP_HPP_

#include <algorithm>
#include <cmath>
#include <string>

#include "gmmclass/common.hpp"
#include "gmmclass/linalg.hpp"
#include "gmmclass/mixture.hpp"
#include "gmmclass/spectra.hpp"

namespace gmmclass {

// Support vectors proliferate (hard-margin SVM equals the min-norm
// interpolator) iff every eta_i e_i'(Y'Y)^{-1} eta is positive.
struct SvpReport {
  bool holds = false;
  Vector margins;         // eta_i e_i'(Y'Y)^{-1} eta
  double min_margin = 0.0;
  double max_discrepancy = 0.0;  // between the two computation routes, relative
};

inline constexpr double kSvpCrossCheckTolerance = 1e-8;

// Margins are computed from an explicit Gram inverse and, independently,
// through the Schur complement of each diagonal entry; the routes must agree.
inline SvpReport svp_margins(const Dataset& data) {
  data.validate();
  require(data.dim() >= data.size(), "svp_margins: requires p >= n");
  const Index n = data.size();
  const Matrix gram = gram_matrix(data.y);
  const Matrix inv = SpdSolver(gram).inverse();
  const Vector direct = (inv * data.eta).cwiseProduct(data.eta);

  Vector schur(n);
  for (Index i = 0; i < n; ++i) schur(i) = data.eta(i) * loo_row_inverse_gram(gram, data.eta, i);

  const double scale = direct.cwiseAbs().maxCoeff();
  const double disc = (direct - schur).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
  if (!(disc <= kSvpCrossCheckTolerance))
    throw NumericalError("svp_margins: direct and Schur-complement margins disagree (relative " + std::to_string(disc) + ")");

  SvpReport r;
  r.margins = direct;
  r.min_margin = direct.minCoeff();
  r.holds = r.min_margin > 0.0;
  r.max_discrepancy = disc;
  return r;
}

// Sufficient conditions for proliferation, with k* = k*(0):
//   (a) k* log^2 n <= C n
//   (b) (sum_{i>k*} lambda_i^2) n log n <= C (sum_{i>k*} lambda_i)^2
//   (c) sqrt(theta'Sigma theta (1 + k*) log n) <= C (sum_{i>k*} lambda_i) / n
// The constant C is unknown in theory, so this is a diagnostic only.
struct ProlifConditions {
  Index k_star = 0;
  bool rank_condition = false;      // (a)
  bool tail_condition = false;      // (b)
  bool signal_condition = false;    // (c)
  bool all = false;
};

inline ProlifConditions prolif_conditions(const CovarianceModel& model, const Vector& theta, Index n, double constant = 1.0,
                                          double c1 = kDefaultC1) {
  require(n >= 2, "prolif_conditions: n must be >= 2");
  require(theta.size() == model.dim(), "prolif_conditions: dimension mismatch");
  ProlifConditions out;
  out.k_star = k_star(model, 0.0, n, c1);
  if (out.k_star >= model.dim()) return out;
  const double log_n = std::log(static_cast<double>(n));
  const double nd = static_cast<double>(n);
  const double ks = static_cast<double>(out.k_star);
  const auto tail = model.eigenvalues().tail(model.dim() - out.k_star);
  const double tail_sum = tail.sum();
  const double tail_sq = tail.squaredNorm();
  out.rank_condition = ks * log_n * log_n <= constant * nd;
  out.tail_condition = tail_sq * nd * log_n <= constant * tail_sum * tail_sum;
  out.signal_condition = std::sqrt(model.quad(theta) * (1.0 + ks) * log_n) <= constant * tail_sum / nd;
  out.all = out.rank_condition && out.tail_condition && out.signal_condition;
  return out;
}

}  // namespace gmmclass

#endif  // GMMCLASS_SVP_HPP_
