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

#ifndef GMMCLASS_SPECTRA_HPP_
#define GMMCLASS_SPECTRA_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmmclass/common.hpp"
#include "gmmclass/linalg.hpp"

namespace gmmclass {

// Full-rank covariance Sigma = V diag(lambda) V' with lambda strictly
// positive and non-increasing. The eigenbasis is stored in one of three
// forms: canonical (Sigma diagonal in the given order), a coordinate
// permutation (diagonal Sigma whose entries are not sorted), or a dense
// orthonormal matrix. Immutable after construction.
class CovarianceModel {
 public:
  enum class Basis { kCanonical, kPermutation, kDense };

  // Diagonal covariance with entries already in non-increasing order.
  static CovarianceModel sorted_diagonal(Vector eigenvalues) {
    CovarianceModel m(std::move(eigenvalues));
    return m;
  }

  // Diagonal covariance with arbitrary positive entries; the entries are
  // sorted and the coordinate of each eigenvalue recorded. Ties keep
  // coordinate order.
  static CovarianceModel diagonal(const Vector& entries) {
    const Index p = entries.size();
    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return entries(a) > entries(b); });
    Vector sorted(p);
    bool identity_order = true;
    for (Index i = 0; i < p; ++i) {
      sorted(i) = entries(order[static_cast<std::size_t>(i)]);
      identity_order = identity_order && order[static_cast<std::size_t>(i)] == i;
    }
    CovarianceModel m(std::move(sorted));
    if (!identity_order) {
      m.basis_kind_ = Basis::kPermutation;
      m.coords_ = std::move(order);
    }
    return m;
  }

  // Covariance with an explicit orthonormal eigenbasis (column i pairs with
  // eigenvalues(i)).
  static CovarianceModel with_basis(Vector eigenvalues, Matrix basis) {
    const Index p = eigenvalues.size();
    require(basis.rows() == p && basis.cols() == p, "CovarianceModel: eigenbasis has wrong shape");
    const double err = (basis.transpose() * basis - Matrix::Identity(p, p)).norm();
    require(err <= 1e-10 * std::max<double>(1.0, std::sqrt(static_cast<double>(p))),
            "CovarianceModel: eigenbasis is not orthonormal");
    CovarianceModel m(std::move(eigenvalues));
    m.basis_kind_ = Basis::kDense;
    m.basis_ = std::move(basis);
    return m;
  }

  Index dim() const { return eigenvalues_.size(); }
  const Vector& eigenvalues() const { return eigenvalues_; }
  // 0-based: eigenvalue(0) is the largest.
  double eigenvalue(Index i) const { return eigenvalues_(i); }
  Basis basis_kind() const { return basis_kind_; }
  // Coordinate carrying eigenvalue i (permutation basis only).
  const std::vector<Index>& coordinates() const { return coords_; }

  // V' x
  Vector to_eigen(const Vector& x) const {
    check_dim(x);
    switch (basis_kind_) {
      case Basis::kCanonical:
        return x;
      case Basis::kPermutation: {
        Vector c(dim());
        for (Index i = 0; i < dim(); ++i) c(i) = x(coord(i));
        return c;
      }
      case Basis::kDense:
        return basis_.transpose() * x;
    }
    return x;
  }

  // V c
  Vector from_eigen(const Vector& c) const {
    check_dim(c);
    switch (basis_kind_) {
      case Basis::kCanonical:
        return c;
      case Basis::kPermutation: {
        Vector x(dim());
        for (Index i = 0; i < dim(); ++i) x(coord(i)) = c(i);
        return x;
      }
      case Basis::kDense:
        return basis_ * c;
    }
    return c;
  }

  Vector eigenvector(Index i) const {
    require(i >= 0 && i < dim(), "CovarianceModel: eigenvector index out of range");
    if (basis_kind_ == Basis::kDense) return basis_.col(i);
    Vector e = Vector::Zero(dim());
    e(coord(i)) = 1.0;
    return e;
  }

  Matrix basis() const {
    if (basis_kind_ == Basis::kDense) return basis_;
    Matrix v = Matrix::Zero(dim(), dim());
    for (Index i = 0; i < dim(); ++i) v(coord(i), i) = 1.0;
    return v;
  }

  Vector apply(const Vector& x) const { return from_eigen(eigenvalues_.cwiseProduct(to_eigen(x))); }
  Vector apply_inverse(const Vector& x) const { return from_eigen(to_eigen(x).cwiseQuotient(eigenvalues_)); }
  // V Lambda^{1/2} z: maps white noise to noise with covariance Sigma.
  Vector apply_sqrt(const Vector& z) const { return from_eigen(eigenvalues_.cwiseSqrt().cwiseProduct(z)); }

  // x' Sigma x
  double quad(const Vector& x) const { return eigenvalues_.dot(to_eigen(x).cwiseAbs2()); }
  // x' Sigma^{-1} x
  double quad_inverse(const Vector& x) const { return to_eigen(x).cwiseAbs2().cwiseQuotient(eigenvalues_).sum(); }

  Matrix dense() const {
    const Matrix v = basis();
    return v * eigenvalues_.asDiagonal() * v.transpose();
  }

  double trace() const { return eigenvalues_.sum(); }
  double trace_sq() const { return eigenvalues_.squaredNorm(); }
  double spectral_norm() const { return eigenvalues_(0); }

 private:
  explicit CovarianceModel(Vector eigenvalues) : eigenvalues_(std::move(eigenvalues)) {
    require(eigenvalues_.size() >= 1, "CovarianceModel: empty spectrum");
    for (Index i = 0; i < eigenvalues_.size(); ++i) {
      require(std::isfinite(eigenvalues_(i)) && eigenvalues_(i) > 0.0, "CovarianceModel: eigenvalues must be positive");
      require(i == 0 || eigenvalues_(i) <= eigenvalues_(i - 1), "CovarianceModel: eigenvalues must be non-increasing");
    }
  }

  Index coord(Index i) const { return basis_kind_ == Basis::kPermutation ? coords_[static_cast<std::size_t>(i)] : i; }
  void check_dim(const Vector& x) const { require(x.size() == dim(), "CovarianceModel: dimension mismatch"); }

  Vector eigenvalues_;
  Basis basis_kind_ = Basis::kCanonical;
  std::vector<Index> coords_;
  Matrix basis_;
};

// Tr(Sigma) / ||Sigma||
inline double effective_rank(const CovarianceModel& model) { return model.trace() / model.spectral_norm(); }

// (sum_{i>k} lambda_i) / lambda_{k+1}, k in [0, p-1].
inline double k_effective_rank(const CovarianceModel& model, Index k) {
  require(k >= 0 && k < model.dim(), "k_effective_rank: k out of range");
  const Vector& lam = model.eigenvalues();
  return lam.tail(model.dim() - k).sum() / lam(k);
}

inline constexpr double kDefaultC1 = 2.0;

// Smallest k >= 0 with r_k(Sigma) + n*ridge/lambda_{k+1} >= c1*n, or p + 1
// when no k in [0, p-1] qualifies.
inline Index k_star(const CovarianceModel& model, double ridge, Index n, double c1 = kDefaultC1) {
  require(n >= 1, "k_star: n must be >= 1");
  require(ridge >= 0.0, "k_star: ridge must be >= 0");
  const Index p = model.dim();
  const Vector& lam = model.eigenvalues();
  const double target = c1 * static_cast<double>(n);
  // tails(k) = sum_{i>=k} lam(i), accumulated from the small end.
  Vector tails(p);
  double acc = 0.0;
  for (Index i = p - 1; i >= 0; --i) tails(i) = (acc += lam(i));
  for (Index k = 0; k < p; ++k)
    if ((tails(k) + static_cast<double>(n) * ridge) / lam(k) >= target) return k;
  return p + 1;
}

// pi_k = sum_{i<=k} v_i v_i'
inline Matrix projector(const CovarianceModel& model, Index k) {
  require(k >= 0 && k <= model.dim(), "projector: k out of range");
  const Matrix v = model.basis().leftCols(k);
  return v * v.transpose();
}

// ||pi_k x||^2 without forming the projector.
inline double projected_norm_sq(const Vector& x, const CovarianceModel& model, Index k) {
  require(k >= 0 && k <= model.dim(), "projected_norm_sq: k out of range");
  return model.to_eigen(x).head(k).squaredNorm();
}

// ||pi_k theta||^2 <= ||theta||^2 / 5
inline bool cone_member(const Vector& theta, const CovarianceModel& model, Index k) {
  const double norm_sq = theta.squaredNorm();
  require(norm_sq > 0.0, "cone_member: theta must be nonzero");
  return projected_norm_sq(theta, model, k) <= norm_sq / 5.0;
}

// Builders. All return canonical-basis models except spectrum_corrupted and
// spectrum_diagonal, which record the sorting permutation.

inline CovarianceModel spectrum_identity(Index p) {
  require(p >= 1, "spectrum_identity: p must be >= 1");
  return CovarianceModel::sorted_diagonal(Vector::Ones(p));
}

// lambda_i = (p - i + 1) / p
inline CovarianceModel spectrum_linear(Index p) {
  require(p >= 1, "spectrum_linear: p must be >= 1");
  Vector lam(p);
  for (Index i = 0; i < p; ++i) lam(i) = static_cast<double>(p - i) / static_cast<double>(p);
  return CovarianceModel::sorted_diagonal(std::move(lam));
}

// k eigenvalues equal to `high`, the remaining p - k equal to `low`.
inline CovarianceModel spectrum_spiked(Index p, Index k, double high, double low) {
  require(p >= 1 && k >= 0 && k <= p, "spectrum_spiked: need 0 <= k <= p");
  require(high > 0.0 && low > 0.0 && high >= low, "spectrum_spiked: need high >= low > 0");
  Vector lam = Vector::Constant(p, low);
  lam.head(k).setConstant(high);
  return CovarianceModel::sorted_diagonal(std::move(lam));
}

inline CovarianceModel spectrum_diagonal(const Vector& entries) { return CovarianceModel::diagonal(entries); }

// I_p + sum_{i in R} O_i e_i e_i' with 0-based coordinates R.
inline CovarianceModel spectrum_corrupted(Index p, const std::vector<Index>& indices, const std::vector<double>& magnitudes) {
  require(p >= 1, "spectrum_corrupted: p must be >= 1");
  require(indices.size() == magnitudes.size(), "spectrum_corrupted: indices and magnitudes differ in length");
  Vector diag = Vector::Ones(p);
  for (std::size_t j = 0; j < indices.size(); ++j) {
    require(indices[j] >= 0 && indices[j] < p, "spectrum_corrupted: index out of range");
    require(magnitudes[j] > 0.0, "spectrum_corrupted: magnitudes must be positive");
    diag(indices[j]) += magnitudes[j];
  }
  return CovarianceModel::diagonal(diag);
}

// Haar-distributed orthogonal matrix via QR of a Gaussian matrix with the
// sign of diag(R) fixed.
template <typename Rng>
Matrix random_orthogonal(Index p, Rng& rng) {
  Matrix g(p, p);
  std::normal_distribution<double> normal;
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < p; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < p; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

// Serializable description of a spectrum. `kind` is one of linear, spiked,
// identity, corrupted, explicit. For explicit, `eigenvalues` are diagonal
// entries in coordinate order (any order; they are sorted on build).
struct SpectrumSpec {
  std::string kind = "identity";
  Index p = 0;
  Index k = 0;
  double high = 1.0;
  double low = 1.0;
  std::vector<Index> indices{};
  std::vector<double> magnitudes{};
  std::vector<double> eigenvalues{};

  CovarianceModel build() const {
    if (kind == "identity") return spectrum_identity(p);
    if (kind == "linear") return spectrum_linear(p);
    if (kind == "spiked") return spectrum_spiked(p, k, high, low);
    if (kind == "corrupted") return spectrum_corrupted(p, indices, magnitudes);
    if (kind == "explicit") {
      require(!eigenvalues.empty(), "spectrum: explicit kind needs eigenvalues");
      require(p == 0 || p == static_cast<Index>(eigenvalues.size()), "spectrum: p does not match eigenvalues");
      return spectrum_diagonal(Eigen::Map<const Vector>(eigenvalues.data(), static_cast<Index>(eigenvalues.size())));
    }
    throw InvalidArgument("spectrum: unknown kind '" + kind + "'");
  }

  Index dim() const { return kind == "explicit" && p == 0 ? static_cast<Index>(eigenvalues.size()) : p; }
};

inline void to_json(nlohmann::json& j, const SpectrumSpec& s) {
  j = nlohmann::json{{"kind", s.kind}};
  if (s.kind != "explicit" || s.p != 0) j["p"] = s.p;
  if (s.kind == "spiked") {
    j["k"] = s.k;
    j["high"] = s.high;
    j["low"] = s.low;
  } else if (s.kind == "corrupted") {
    j["indices"] = s.indices;
    j["magnitudes"] = s.magnitudes;
  } else if (s.kind == "explicit") {
    j["eigenvalues"] = s.eigenvalues;
  }
}

inline void from_json(const nlohmann::json& j, SpectrumSpec& s) {
  require(j.is_object() && j.contains("kind"), "spectrum: JSON object with a 'kind' field expected");
  static const std::vector<std::string> known{"kind", "p", "k", "high", "low", "indices", "magnitudes", "eigenvalues"};
  for (const auto& [key, _] : j.items())
    require(std::find(known.begin(), known.end(), key) != known.end(), "spectrum: unknown field '" + key + "'");
  s = SpectrumSpec{};
  j.at("kind").get_to(s.kind);
  if (j.contains("p")) j.at("p").get_to(s.p);
  if (j.contains("k")) j.at("k").get_to(s.k);
  if (j.contains("high")) j.at("high").get_to(s.high);
  if (j.contains("low")) j.at("low").get_to(s.low);
  if (j.contains("indices")) j.at("indices").get_to(s.indices);
  if (j.contains("magnitudes")) j.at("magnitudes").get_to(s.magnitudes);
  if (j.contains("eigenvalues")) j.at("eigenvalues").get_to(s.eigenvalues);
}

}  // namespace gmmclass

#endif  // GMMCLASS_SPECTRA_HPP_
