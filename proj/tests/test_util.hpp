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

// Test-only helpers: random instances and brute-force oracles that do not go
// through the library code paths they are used to check.

#ifndef GMMCLASS_TESTS_TEST_UTIL_HPP_
#define GMMCLASS_TESTS_TEST_UTIL_HPP_

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace gmmclass::testing {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(gen);
  return m;
}

inline Vector gaussian_vector(Eigen::Index n, std::mt19937_64& gen) { return gaussian_matrix(n, 1, gen).col(0); }

// SPD with eigenvalues in roughly [1, 3].
inline Matrix random_spd(Eigen::Index n, std::mt19937_64& gen) {
  const Matrix x = gaussian_matrix(n, 2 * n, gen);
  return x * x.transpose() / static_cast<double>(4 * n) + Matrix::Identity(n, n);
}

inline Matrix random_symmetric(Eigen::Index n, std::mt19937_64& gen) {
  const Matrix x = gaussian_matrix(n, n, gen);
  return (x + x.transpose()) / 2.0;
}

inline double rel_err(const Matrix& got, const Matrix& want) { return (got - want).norm() / want.norm(); }

// Hard-margin SVM by enumerating every support pattern S: alpha_S solves
// K_SS alpha_S = 1 with alpha_S >= 0 and every point outside S has margin
// >= 1. Returns the smallest ||w||^2 = sum(alpha) among feasible patterns
// (the optimum is unique, so exactly one pattern attains it up to ties).
struct BruteForceSvm {
  double objective = std::numeric_limits<double>::infinity();
  Vector w;
};

inline BruteForceSvm brute_force_svm(const Matrix& y, const Vector& eta) {
  const Eigen::Index n = y.cols();
  const Matrix z = y * eta.asDiagonal();  // columns eta_i Y_i
  const Matrix k = z.transpose() * z;
  BruteForceSvm best;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<Eigen::Index> s;
    for (Eigen::Index i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(i);
    const Eigen::Index m = static_cast<Eigen::Index>(s.size());
    Matrix kss(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) kss(a, b) = k(s[a], s[b]);
    const Vector a_s = kss.fullPivLu().solve(Vector::Ones(m));
    if ((kss * a_s - Vector::Ones(m)).norm() > 1e-9) continue;
    if ((a_s.array() < 0.0).any()) continue;
    Vector alpha = Vector::Zero(n);
    for (Eigen::Index a = 0; a < m; ++a) alpha(s[a]) = a_s(a);
    const Vector w = z * alpha;
    const Vector margins = z.transpose() * w;
    if ((margins.array() < 1.0 - 1e-9).any()) continue;
    const double obj = w.squaredNorm();
    if (obj < best.objective) {
      best.objective = obj;
      best.w = w;
    }
  }
  return best;
}

}  // namespace gmmclass::testing

#endif  // GMMCLASS_TESTS_TEST_UTIL_HPP_
