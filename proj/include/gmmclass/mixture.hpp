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

#ifndef GMMCLASS_MIXTURE_HPP_
#define GMMCLASS_MIXTURE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gmmclass/common.hpp"
#include "gmmclass/rng.hpp"
#include "gmmclass/spectra.hpp"

namespace gmmclass {

enum class NoiseKind { kGaussian, kRademacher };

inline std::string to_string(NoiseKind k) { return k == NoiseKind::kGaussian ? "gaussian" : "rademacher"; }

inline NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "gaussian") return NoiseKind::kGaussian;
  if (s == "rademacher") return NoiseKind::kRademacher;
  throw InvalidArgument("unknown noise kind '" + s + "' (expected gaussian or rademacher)");
}

// Y_i = theta * eta_i + V Lambda^{1/2} w_i, with w_i having i.i.d. standard
// normal or +-1 entries.
struct MixtureParams {
  Vector theta;
  CovarianceModel covariance;
  NoiseKind noise = NoiseKind::kGaussian;

  MixtureParams(Vector theta_, CovarianceModel covariance_, NoiseKind noise_ = NoiseKind::kGaussian)
      : theta(std::move(theta_)), covariance(std::move(covariance_)), noise(noise_) {
    require(theta.size() == covariance.dim(), "MixtureParams: theta and covariance dimensions differ");
  }

  Index dim() const { return theta.size(); }
};

// Observations as columns of y (p x n), labels +-1 in eta.
struct Dataset {
  Matrix y;
  Vector eta;

  Index dim() const { return y.rows(); }
  Index size() const { return y.cols(); }

  void validate() const {
    require(y.cols() == eta.size(), "Dataset: column count differs from label count");
    for (Index i = 0; i < eta.size(); ++i) require(eta(i) == 1.0 || eta(i) == -1.0, "Dataset: labels must be +1 or -1");
  }
};

// White noise vector of length p for the given kind.
inline Vector draw_white_noise(Index p, NoiseKind kind, Philox& rng) {
  Vector z(p);
  if (kind == NoiseKind::kGaussian) {
    std::normal_distribution<double> normal;
    for (Index j = 0; j < p; ++j) z(j) = normal(rng);
  } else {
    for (Index j = 0; j < p; ++j) z(j) = rng.rademacher();
  }
  return z;
}

// One fresh (Y, eta) pair; returns eta and writes Y into `out`.
inline double draw_observation(const MixtureParams& params, Philox& rng, Vector& out) {
  const double eta = rng.rademacher();
  out = params.theta * eta + params.covariance.apply_sqrt(draw_white_noise(params.dim(), params.noise, rng));
  return eta;
}

inline Dataset sample_dataset(const MixtureParams& params, Index n, Philox& rng) {
  require(n >= 1, "sample_dataset: n must be >= 1");
  Dataset d{Matrix(params.dim(), n), Vector(n)};
  Vector col;
  for (Index i = 0; i < n; ++i) {
    d.eta(i) = draw_observation(params, rng, col);
    d.y.col(i) = col;
  }
  return d;
}

inline Dataset sample_dataset(const MixtureParams& params, Index n, std::uint64_t seed) {
  Philox rng = make_stream(seed, StreamTag::kDataset);
  return sample_dataset(params, n, rng);
}

// Uniform direction on the unit sphere, scaled to the requested norm.
inline Vector sample_theta_spherical(Index p, double norm, Philox& rng) {
  require(p >= 1, "sample_theta_spherical: p must be >= 1");
  require(norm > 0.0, "sample_theta_spherical: norm must be positive");
  std::normal_distribution<double> normal;
  Vector g(p);
  double len = 0.0;
  while (!(len > 0.0)) {
    for (Index j = 0; j < p; ++j) g(j) = normal(rng);
    len = g.norm();
  }
  return g * (norm / len);
}

inline Vector sample_theta_spherical(Index p, double norm, std::uint64_t seed) {
  Philox rng = make_stream(seed, StreamTag::kTheta);
  return sample_theta_spherical(p, norm, rng);
}

// Adversarial training-set corruption: coordinates R (0-based) receive extra
// independent Gaussian noise of variance O_i.
struct CorruptionSpec {
  std::vector<Index> indices{};
  std::vector<double> magnitudes{};
  Index budget = 0;

  void validate(Index p) const {
    require(indices.size() == magnitudes.size(), "CorruptionSpec: indices and magnitudes differ in length");
    require(static_cast<Index>(indices.size()) <= budget, "CorruptionSpec: corruption budget exceeded");
    std::vector<Index> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "CorruptionSpec: duplicate index");
    for (std::size_t j = 0; j < indices.size(); ++j) {
      require(indices[j] >= 0 && indices[j] < p, "CorruptionSpec: index out of range");
      require(magnitudes[j] > 0.0 && std::isfinite(magnitudes[j]), "CorruptionSpec: magnitudes must be positive");
    }
  }
};

// `count` distinct coordinates of [0, p) drawn uniformly, each with
// magnitude `magnitude`. The returned indices are sorted.
inline CorruptionSpec random_corruption(Index p, Index count, double magnitude, Index budget, Philox& rng) {
  require(count >= 0 && count <= p, "random_corruption: count must lie in [0, p]");
  std::vector<Index> pool(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) pool[static_cast<std::size_t>(j)] = j;
  // Partial Fisher-Yates.
  for (Index j = 0; j < count; ++j) {
    std::uniform_int_distribution<Index> pick(j, p - 1);
    std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  CorruptionSpec spec;
  spec.indices.assign(pool.begin(), pool.begin() + count);
  std::sort(spec.indices.begin(), spec.indices.end());
  spec.magnitudes.assign(static_cast<std::size_t>(count), magnitude);
  spec.budget = budget;
  return spec;
}

inline Dataset corrupt(const Dataset& data, const CorruptionSpec& spec, Philox& rng) {
  spec.validate(data.dim());
  Dataset out = data;
  std::normal_distribution<double> normal;
  for (Index i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < spec.indices.size(); ++j)
      out.y(spec.indices[j], i) += std::sqrt(spec.magnitudes[j]) * normal(rng);
  return out;
}

inline Dataset corrupt(const Dataset& data, const CorruptionSpec& spec, std::uint64_t seed) {
  Philox rng = make_stream(seed, StreamTag::kCorruption);
  return corrupt(data, spec, rng);
}

// Debug export, one row per observation: col,label,y_1..y_p.
inline void write_dataset_csv(std::ostream& os, const Dataset& d) {
  os << "col,label";
  for (Index j = 0; j < d.dim(); ++j) os << ",y_" << (j + 1);
  os << '\n';
  char buf[32];
  for (Index i = 0; i < d.size(); ++i) {
    os << (i + 1) << ',' << (d.eta(i) > 0 ? "1" : "-1");
    for (Index j = 0; j < d.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", d.y(j, i));
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace gmmclass

#endif  // GMMCLASS_MIXTURE_HPP_
