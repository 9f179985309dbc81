// Copyright 2026 The nonbilocal Authors
//
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

#pragma once

// Seeded sampling of kets, mixed states and unitaries. std::mt19937_64 has a
// standardized output sequence; the distributions below are written out so
// that samples are identical across standard library implementations.

#include "nbl/hilbert.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace nbl {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in (0, 1).
  double uniform() {
    // 53 random bits, shifted off zero.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  /// Complex normal with unit variance per component.
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer, used to derive independent seeds from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
  }
  return g;
}

/// Haar-random unitary: QR of a Ginibre matrix with R's diagonal phases
/// absorbed into Q.
inline Matrix haar_unitary(Eigen::Index d, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(ginibre(d, d, rng));
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < d; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0.0) q.col(k) *= r(k, k) / a;
  }
  return q;
}

inline Matrix haar_unitary(Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  return haar_unitary(d, rng);
}

inline Ket random_ket(const Dims& dims, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(detail::product(dims));
  detail::check_total_dim(static_cast<std::size_t>(d));
  return Ket::normalized(ginibre(d, 1, rng).col(0), dims);
}

/// Haar-distributed pure state.
inline Ket random_ket(const Dims& dims, std::uint64_t seed) {
  Rng rng(seed);
  return random_ket(dims, rng);
}

inline DensityOperator random_state(const Dims& dims, int rank, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(detail::product(dims));
  detail::check_total_dim(static_cast<std::size_t>(d));
  if (rank < 1 || rank > d) {
    throw std::invalid_argument("random_state: rank " + std::to_string(rank) + " outside [1, " +
                                std::to_string(d) + "]");
  }
  const Matrix g = ginibre(d, rank, rng);
  return DensityOperator::normalized(g * g.adjoint(), dims);
}

/// Mixed state of the requested rank induced by a d x rank Ginibre matrix.
inline DensityOperator random_state(const Dims& dims, int rank, std::uint64_t seed) {
  Rng rng(seed);
  return random_state(dims, rank, rng);
}

inline DensityOperator random_state(int dim, int rank, std::uint64_t seed) {
  return random_state(Dims{dim}, rank, seed);
}

inline Matrix random_hermitian(Eigen::Index d, Rng& rng) {
  const Matrix g = ginibre(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

}  // namespace nbl
