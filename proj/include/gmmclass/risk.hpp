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

#ifndef GMMCLASS_RISK_HPP_
#define GMMCLASS_RISK_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "gmmclass/classify.hpp"
#include "gmmclass/common.hpp"
#include "gmmclass/mixture.hpp"
#include "gmmclass/parallel.hpp"
#include "gmmclass/rng.hpp"
#include "gmmclass/spectra.hpp"

namespace gmmclass {

// Standard normal CDF. erfc keeps full relative accuracy in the lower tail
// until it underflows near x = -37; past that the asymptotic Mills-ratio
// series is used.
inline double normal_cdf(double x) {
  if (x >= -37.0) return 0.5 * std::erfc(-x / std::numbers::sqrt2);
  const double x2 = x * x;
  const double pdf = std::exp(-0.5 * x2) / std::sqrt(2.0 * std::numbers::pi);
  return pdf / -x * (1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2));
}

// Conditional misclassification probability of sign(w'.) under Gaussian
// noise: eta w'Y = w'theta + N(0, w'Sigma w), so the risk is
// Phi(-w'theta / sqrt(w'Sigma w)).
inline double exact_gaussian_risk(const Vector& w, const Vector& theta, const CovarianceModel& model) {
  require(w.size() == model.dim() && theta.size() == model.dim(), "exact_gaussian_risk: dimension mismatch");
  const double spread = model.quad(w);
  if (!(spread > 0.0)) throw NumericalError("exact_gaussian_risk: w'Sigma w is not positive");
  return normal_cdf(-w.dot(theta) / std::sqrt(spread));
}

struct RiskReport {
  std::optional<double> exact;
  std::optional<double> mc_estimate;
  std::optional<double> mc_halfwidth;  // 3 sigma binomial
  std::int64_t replicates = 0;
};

inline constexpr std::int64_t kMcBlockSize = 4096;

// 3 * sqrt(R(1-R)/m + 1/m^2)
inline double mc_halfwidth(double rate, std::int64_t m) {
  const double md = static_cast<double>(m);
  return 3.0 * std::sqrt(rate * (1.0 - rate) / md + 1.0 / (md * md));
}

// Error frequency of `c` on `samples` fresh draws from `params`. Samples are
// drawn in fixed-size blocks, each from its own derived stream, so the
// estimate depends on the seed only and not on `threads`.
inline RiskReport mc_risk(const LinearClassifier& c, const MixtureParams& params, std::int64_t samples, std::uint64_t seed,
                          unsigned threads = 1) {
  require(samples >= 1, "mc_risk: samples must be >= 1");
  require(c.dim() == params.dim(), "mc_risk: dimension mismatch");
  const std::int64_t blocks = (samples + kMcBlockSize - 1) / kMcBlockSize;
  std::vector<std::int64_t> errors(static_cast<std::size_t>(blocks), 0);
  parallel_for(static_cast<std::size_t>(blocks), threads, [&](std::size_t b) {
    Philox rng = make_stream(seed, StreamTag::kTestSample, b);
    const std::int64_t begin = static_cast<std::int64_t>(b) * kMcBlockSize;
    const std::int64_t end = std::min(samples, begin + kMcBlockSize);
    std::int64_t wrong = 0;
    Vector y;
    for (std::int64_t s = begin; s < end; ++s) {
      const double eta = draw_observation(params, rng, y);
      wrong += (predict(c, y) != static_cast<int>(eta));
    }
    errors[b] = wrong;
  });
  std::int64_t total = 0;
  for (auto e : errors) total += e;
  RiskReport r;
  r.replicates = samples;
  r.mc_estimate = static_cast<double>(total) / static_cast<double>(samples);
  r.mc_halfwidth = mc_halfwidth(*r.mc_estimate, samples);
  return r;
}

// Theoretical bound curves. The absolute constants are unknown, so they are
// parameters and the curves are qualitative overlays. Every curve is clamped
// to (0, 1]; the floor is the smallest normal double.
struct BoundConstants {
  double c = 1.0;
  double C = 1.0;
};

namespace detail {

inline double clamp_bound(double v) { return std::clamp(v, std::numeric_limits<double>::min(), 1.0); }

}  // namespace detail

// C exp(-c delta^4 / (delta^2 + r/n))
inline double bound_minimax_lower(double delta, double r, Index n, const BoundConstants& k = {}) {
  require(delta > 0.0 && r >= 1.0 && n >= 1, "bound_minimax_lower: need delta > 0, r >= 1, n >= 1");
  const double d2 = delta * delta;
  return detail::clamp_bound(k.C * std::exp(-k.c * d2 * d2 / (d2 + r / static_cast<double>(n))));
}

// High-probability bound for the averaging classifier:
// C exp(-c ||theta||^4 / (theta'Sigma theta + (Tr(Sigma^2) + ||Sigma||^2 log(1/delta_prob)) / n)).
inline double bound_averaging_upper(const Vector& theta, const CovarianceModel& model, Index n, double delta_prob,
                                    const BoundConstants& k = {}) {
  require(theta.size() == model.dim(), "bound_averaging_upper: dimension mismatch");
  require(theta.squaredNorm() > 0.0, "bound_averaging_upper: theta must be nonzero");
  require(n >= 1 && delta_prob > 0.0 && delta_prob < 1.0, "bound_averaging_upper: need n >= 1, 0 < delta < 1");
  const double t2 = theta.squaredNorm();
  const double lam1 = model.spectral_norm();
  const double denom = model.quad(theta) + (model.trace_sq() + lam1 * lam1 * std::log(1.0 / delta_prob)) / static_cast<double>(n);
  return detail::clamp_bound(k.C * std::exp(-k.c * t2 * t2 / denom));
}

// Expectation form over ||theta||^2 >= delta^2 ||Sigma||:
// C exp(-c delta^4 / (delta^2 + r(Sigma^2)/n)).
inline double bound_averaging_expected(double delta, const CovarianceModel& model, Index n, const BoundConstants& k = {}) {
  const double lam1 = model.spectral_norm();
  return bound_minimax_lower(delta, model.trace_sq() / (lam1 * lam1), n, k);
}

struct RidgeBound {
  std::optional<double> value;  // empty when k* > n/2 (bound does not apply)
  Index k_star = 0;
  bool cone_condition = false;  // ||pi_{k*} theta||^2 <= ||theta||^2 / 5
};

// High-probability bound for the ridge classifier with k* = k*(lambda):
// C exp(-c ||theta||^4 / (theta'Sigma theta (1 + k*)
//                         + (k* lambda_{k*}^2 + sum_{i>k*} lambda_i^2) / n
//                         + (k* lambda_{k*}^2 + lambda_{k*+1}^2) log(1/delta_prob) / n)).
inline RidgeBound bound_ridge_upper(const Vector& theta, const CovarianceModel& model, double lambda, Index n, double delta_prob,
                                    const BoundConstants& k = {}, double c1 = kDefaultC1) {
  require(theta.size() == model.dim(), "bound_ridge_upper: dimension mismatch");
  require(theta.squaredNorm() > 0.0, "bound_ridge_upper: theta must be nonzero");
  require(n >= 1 && delta_prob > 0.0 && delta_prob < 1.0, "bound_ridge_upper: need n >= 1, 0 < delta < 1");
  RidgeBound out;
  out.k_star = k_star(model, lambda, n, c1);
  if (2 * out.k_star > n || out.k_star >= model.dim()) return out;
  out.cone_condition = cone_member(theta, model, out.k_star);
  const Vector& lam = model.eigenvalues();
  const Index ks = out.k_star;
  const double nd = static_cast<double>(n);
  const double head = ks == 0 ? 0.0 : static_cast<double>(ks) * lam(ks - 1) * lam(ks - 1);
  const double tail_sq = lam.tail(model.dim() - ks).squaredNorm();
  const double next_sq = lam(ks) * lam(ks);
  const double t2 = theta.squaredNorm();
  const double denom = model.quad(theta) * (1.0 + static_cast<double>(ks)) + (head + tail_sq) / nd +
                       (head + next_sq) * std::log(1.0 / delta_prob) / nd;
  out.value = detail::clamp_bound(k.C * std::exp(-k.c * t2 * t2 / denom));
  return out;
}

// Lower bound for oracle LDA (p >= n): C exp(-c m^2 / (m + p/n)), m = theta'Sigma^{-1}theta.
inline double bound_lda_lower(const Vector& theta, const CovarianceModel& model, Index n, const BoundConstants& k = {}) {
  require(theta.size() == model.dim(), "bound_lda_lower: dimension mismatch");
  require(n >= 1 && model.dim() >= n, "bound_lda_lower: requires p >= n");
  const double m = model.quad_inverse(theta);
  return detail::clamp_bound(k.C * std::exp(-k.c * m * m / (m + static_cast<double>(model.dim()) / static_cast<double>(n))));
}

}  // namespace gmmclass

#endif  // GMMCLASS_RISK_HPP_
