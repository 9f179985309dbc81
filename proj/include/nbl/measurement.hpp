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

/**
 * @file measurement.hpp
 * @brief Von Neumann measurements on a contiguous run of subsystems, the
 * post-measurement map X -> sum_k Pi_k X Pi_k, and the manifold of rank-1
 * measurements that leave a marginal state unchanged.
 *
 * A rank-1 measurement leaves a marginal invariant exactly when its vectors
 * are eigenvectors of that marginal, so the family is parameterized by one
 * unitary per eigenspace: vectors = E_b * W_b for each eigenspace basis E_b.
 */

#include "nbl/hilbert.hpp"
#include "nbl/random.hpp"

#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nbl {

struct ProjectiveMeasurement {
  std::vector<int> target;  ///< measured subsystem indices (contiguous, ascending)
  Dims target_dims;         ///< dimensions of the measured subsystems
  std::vector<Matrix> projectors;

  /// Rank-1 measurement whose outcomes are the columns of `basis`.
  static ProjectiveMeasurement from_basis(std::vector<int> target, Dims target_dims, const Matrix& basis) {
    if (static_cast<std::size_t>(basis.rows()) != detail::product(target_dims) || basis.rows() != basis.cols()) {
      throw DimensionError("measurement basis must be square with side equal to the target dimension");
    }
    ProjectiveMeasurement m{std::move(target), std::move(target_dims), {}};
    m.projectors.reserve(static_cast<std::size_t>(basis.cols()));
    for (Eigen::Index k = 0; k < basis.cols(); ++k) m.projectors.push_back(basis.col(k) * basis.col(k).adjoint());
    return m;
  }

  [[nodiscard]] Eigen::Index space_dim() const { return static_cast<Eigen::Index>(detail::product(target_dims)); }

  [[nodiscard]] std::vector<int> rank_profile() const {
    std::vector<int> ranks;
    for (const auto& p : projectors) ranks.push_back(static_cast<int>(std::lround(p.trace().real())));
    return ranks;
  }

  [[nodiscard]] bool is_rank_one() const {
    const auto r = rank_profile();
    return std::all_of(r.begin(), r.end(), [](int k) { return k == 1; });
  }

  /// Largest violation of Hermiticity, idempotence, mutual orthogonality and
  /// completeness (max elementwise deviation).
  [[nodiscard]] double defect() const {
    const Eigen::Index d = space_dim();
    double worst = 0.0;
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t a = 0; a < projectors.size(); ++a) {
      const Matrix& p = projectors[a];
      worst = std::max(worst, detail::max_abs(p - p.adjoint()));
      worst = std::max(worst, detail::max_abs(p * p - p));
      for (std::size_t b = a + 1; b < projectors.size(); ++b) {
        worst = std::max(worst, detail::max_abs(p * projectors[b]));
      }
      sum += p;
    }
    return std::max(worst, detail::max_abs(sum - Matrix::Identity(d, d)));
  }

  /// Unit vectors spanning each rank-1 projector, as columns.
  [[nodiscard]] Matrix vectors() const {
    if (!is_rank_one()) throw std::invalid_argument("vectors: measurement is not rank-1");
    const Eigen::Index d = space_dim();
    Matrix out(d, static_cast<Eigen::Index>(projectors.size()));
    for (std::size_t k = 0; k < projectors.size(); ++k) {
      Eigen::Index col = 0;
      projectors[k].diagonal().real().maxCoeff(&col);
      out.col(static_cast<Eigen::Index>(k)) = projectors[k].col(col).normalized();
    }
    return out;
  }
};

namespace detail {

struct Split {
  Eigen::Index left, mid, right;
};

inline Split split_for(const Dims& dims, const std::vector<int>& target, const Dims& target_dims) {
  if (target.empty() || target.size() != target_dims.size()) throw DimensionError("measurement target is empty");
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (target[k] < 0 || target[k] >= static_cast<int>(dims.size())) {
      throw DimensionError("measurement target index " + std::to_string(target[k]) + " out of range");
    }
    if (k > 0 && target[k] != target[k - 1] + 1) throw DimensionError("measurement target must be contiguous");
    if (dims[target[k]] != target_dims[k]) {
      throw DimensionError("measurement target dims do not match operator dims " + dims_to_string(dims));
    }
  }
  Split s{1, 1, 1};
  for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
    if (k < target.front()) s.left *= dims[k];
    else if (k > target.back()) s.right *= dims[k];
    else s.mid *= dims[k];
  }
  return s;
}

// A * (I_left (x) P (x) I_right) without forming the Kronecker product.
inline Matrix right_multiply_local(const Matrix& a, const Matrix& p, const Split& s) {
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (Eigen::Index l = 0; l < s.left; ++l) {
    for (Eigen::Index r = 0; r < s.right; ++r) {
      for (Eigen::Index n = 0; n < s.mid; ++n) {
        const Eigen::Index dst = (l * s.mid + n) * s.right + r;
        for (Eigen::Index m = 0; m < s.mid; ++m) {
          const Complex w = p(m, n);
          if (w == Complex(0.0, 0.0)) continue;
          out.col(dst) += w * a.col((l * s.mid + m) * s.right + r);
        }
      }
    }
  }
  return out;
}

}  // namespace detail

/// Post-measurement operator sum_k (I (x) Pi_k (x) I) X (I (x) Pi_k (x) I).
inline Operator apply(const ProjectiveMeasurement& meas, const Operator& op) {
  const auto s = detail::split_for(op.dims, meas.target, meas.target_dims);
  Matrix out = Matrix::Zero(op.dim(), op.dim());
  for (const auto& p : meas.projectors) {
    const Matrix ap = detail::right_multiply_local(op.matrix, p, s);
    // (P~ A P~) = (P~ (A P~)^dagger)^dagger for Hermitian P~.
    out += detail::right_multiply_local(ap.adjoint(), p, s).adjoint();
  }
  return {0.5 * (out + out.adjoint()), op.dims};
}

inline Operator apply(const ProjectiveMeasurement& meas, const DensityOperator& rho) {
  return apply(meas, Operator{rho.matrix(), rho.dims()});
}

/// Tr(X * Pi(X)) = sum_k Tr[(X P~_k)^2] for Hermitian X.
inline double overlap(const Operator& op, const ProjectiveMeasurement& meas) {
  const auto s = detail::split_for(op.dims, meas.target, meas.target_dims);
  double acc = 0.0;
  for (const auto& p : meas.projectors) {
    const Matrix xp = detail::right_multiply_local(op.matrix, p, s);
    acc += trace_product(xp, xp).real();
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Invariant families

struct InvariantMeasurementFamily {
  std::vector<int> target;
  Dims target_dims;
  Matrix marginal;
  std::vector<EigenBlock> blocks;
  int parameter_count = 0;  ///< sum of squared block sizes

  /// True when every eigenspace is one-dimensional, so the family has a
  /// single member up to phases.
  [[nodiscard]] bool is_point() const {
    return std::all_of(blocks.begin(), blocks.end(), [](const EigenBlock& b) { return b.size() == 1; });
  }
};

/// Family of rank-1 measurements on `target` that commute with `marginal`.
/// When `target` is empty the measurement acts on subsystems 0..k-1.
inline InvariantMeasurementFamily eigen_family(const DensityOperator& marginal, std::vector<int> target = {}) {
  if (target.empty()) {
    target.resize(marginal.dims().size());
    std::iota(target.begin(), target.end(), 0);
  }
  if (target.size() != marginal.dims().size()) {
    throw DimensionError("eigen_family: target has " + std::to_string(target.size()) +
                         " subsystems but marginal has " + std::to_string(marginal.dims().size()));
  }
  InvariantMeasurementFamily f;
  f.target = std::move(target);
  f.target_dims = marginal.dims();
  f.marginal = marginal.matrix();
  f.blocks = spectral_blocks(marginal.matrix());
  for (const auto& b : f.blocks) f.parameter_count += static_cast<int>(b.size() * b.size());
  return f;
}

/// exp(i H) where H is Hermitian with diagonal params[0..d) followed by
/// (re, im) pairs for the strict upper triangle in row-major order.
inline Matrix generator_unitary(Eigen::Index d, std::span<const double> params) {
  if (static_cast<Eigen::Index>(params.size()) != d * d) {
    throw std::invalid_argument("generator_unitary: expected " + std::to_string(d * d) + " parameters");
  }
  if (d == 1) return Matrix::Constant(1, 1, std::exp(Complex(0.0, params[0])));
  Matrix h = Matrix::Zero(d, d);
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < d; ++i) h(i, i) = params[idx++];
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      h(i, j) = Complex(params[idx], params[idx + 1]);
      h(j, i) = std::conj(h(i, j));
      idx += 2;
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(d);
  for (Eigen::Index k = 0; k < d; ++k) phases(k) = std::exp(Complex(0.0, es.eigenvalues()(k)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

using BlockUnitaries = std::vector<Matrix>;

inline ProjectiveMeasurement measurement_from_blocks(const InvariantMeasurementFamily& family,
                                                     const BlockUnitaries& unitaries) {
  if (unitaries.size() != family.blocks.size()) throw std::invalid_argument("one unitary per eigenspace required");
  const auto d = static_cast<Eigen::Index>(detail::product(family.target_dims));
  Matrix q(d, d);
  Eigen::Index col = 0;
  for (std::size_t b = 0; b < family.blocks.size(); ++b) {
    const auto& blk = family.blocks[b];
    q.middleCols(col, blk.size()) = blk.basis * unitaries[b];
    col += blk.size();
  }
  return ProjectiveMeasurement::from_basis(family.target, family.target_dims, q);
}

/// Splits a flat parameter vector into per-block unitaries.
inline BlockUnitaries block_unitaries(const InvariantMeasurementFamily& family, std::span<const double> params) {
  if (static_cast<int>(params.size()) != family.parameter_count) {
    throw std::invalid_argument("measurement_at: expected " + std::to_string(family.parameter_count) +
                                " parameters, got " + std::to_string(params.size()));
  }
  BlockUnitaries out;
  std::size_t offset = 0;
  for (const auto& blk : family.blocks) {
    const auto n = static_cast<std::size_t>(blk.size() * blk.size());
    out.push_back(generator_unitary(blk.size(), params.subspan(offset, n)));
    offset += n;
  }
  return out;
}

inline ProjectiveMeasurement measurement_at(const InvariantMeasurementFamily& family, std::span<const double> params) {
  return measurement_from_blocks(family, block_unitaries(family, params));
}

inline BlockUnitaries identity_blocks(const InvariantMeasurementFamily& family) {
  BlockUnitaries out;
  for (const auto& blk : family.blocks) out.push_back(Matrix::Identity(blk.size(), blk.size()));
  return out;
}

inline BlockUnitaries haar_blocks(const InvariantMeasurementFamily& family, std::uint64_t seed) {
  Rng rng(seed);
  BlockUnitaries out;
  for (const auto& blk : family.blocks) {
    out.push_back(blk.size() == 1 ? Matrix::Identity(1, 1) : haar_unitary(blk.size(), rng));
  }
  return out;
}

/// Family member with Haar-distributed unitaries on every degenerate block.
inline ProjectiveMeasurement haar_sample(const InvariantMeasurementFamily& family, std::uint64_t seed) {
  return measurement_from_blocks(family, haar_blocks(family, seed));
}

/// Block unitaries reproducing `meas` inside the family, or nullopt when the
/// measurement does not leave the family's marginal invariant.
inline std::optional<BlockUnitaries> chart_of(const InvariantMeasurementFamily& family,
                                              const ProjectiveMeasurement& meas, double tolerance = 1e-8) {
  if (meas.target_dims != family.target_dims || !meas.is_rank_one()) return std::nullopt;
  const Matrix vecs = meas.vectors();
  std::vector<std::vector<Vector>> coords(family.blocks.size());
  for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
    int owner = -1;
    for (std::size_t b = 0; b < family.blocks.size(); ++b) {
      const Vector c = family.blocks[b].basis.adjoint() * vecs.col(k);
      const double w = c.squaredNorm();
      if (w > 1.0 - tolerance) {
        owner = static_cast<int>(b);
        coords[b].push_back(c.normalized());
      } else if (w > tolerance) {
        return std::nullopt;
      }
    }
    if (owner < 0) return std::nullopt;
  }
  BlockUnitaries out;
  for (std::size_t b = 0; b < family.blocks.size(); ++b) {
    const Eigen::Index d = family.blocks[b].size();
    if (static_cast<Eigen::Index>(coords[b].size()) != d) return std::nullopt;
    Matrix w(d, d);
    for (Eigen::Index k = 0; k < d; ++k) w.col(k) = coords[b][static_cast<std::size_t>(k)];
    // Re-orthonormalize to absorb tolerance-level drift.
    Eigen::HouseholderQR<Matrix> qr(w);
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    const Matrix& r = qr.matrixQR();
    for (Eigen::Index k = 0; k < d; ++k) {
      const double a = std::abs(r(k, k));
      if (a > 0.0) q.col(k) *= r(k, k) / a;
    }
    out.push_back(std::move(q));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structured two-qubit bases

/// (|00>+|11>, |00>-|11>, |01>+|10>, |01>-|10>) / sqrt(2) as columns.
inline Matrix bell_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix b = Matrix::Zero(4, 4);
  b(0, 0) = s, b(3, 0) = s;
  b(0, 1) = s, b(3, 1) = -s;
  b(1, 2) = s, b(2, 2) = s;
  b(1, 3) = s, b(2, 3) = -s;
  return b;
}

inline Matrix hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix h(2, 2);
  h << s, s, s, -s;
  return h;
}

/// Columns H(x)H |ij>.
inline Matrix hadamard_product_basis() { return kron(hadamard(), hadamard()); }

}  // namespace nbl
