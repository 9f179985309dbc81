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
 * @file hilbert.hpp
 * @brief Finite-dimensional state algebra: kets, density operators, tensor
 * products, partial traces, PSD square roots, Schmidt forms and affinity.
 *
 * Subsystems are always ordered left to right in Kronecker order and every
 * flattened index is row-major over that order, i.e. for dims (d0, d1, d2)
 * the basis state |i0 i1 i2> sits at (i0 * d1 + i1) * d2 + i2.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nbl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<int>;

/// Largest total Hilbert-space dimension any operation accepts.
inline constexpr std::size_t kMaxTotalDim = 4096;

namespace tol {
inline constexpr double kKetNorm = 1e-12;
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPsd = 1e-10;
inline constexpr double kDegeneracy = 1e-8;
}  // namespace tol

/// Inconsistent dimensions, subsystem indices or factor counts.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix that should be a valid state is not.
class InvalidStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Eigenvalue below the PSD clipping window.
class NotPsdError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Total dimension above kMaxTotalDim.
class DimensionCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A theorem or operation precondition (e.g. nondegeneracy) does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::size_t product(const Dims& dims) {
  std::size_t p = 1;
  for (int d : dims) {
    if (d < 1) throw DimensionError("subsystem dimensions must be positive");
    p *= static_cast<std::size_t>(d);
  }
  return p;
}

inline std::string dims_to_string(const Dims& dims) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
  os << ')';
  return os.str();
}

inline void check_total_dim(std::size_t total) {
  if (total > kMaxTotalDim) {
    throw DimensionCapError("total dimension " + std::to_string(total) +
                            " exceeds cap " + std::to_string(kMaxTotalDim));
  }
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Row-major strides for a list of subsystem dimensions.
inline std::vector<std::size_t> strides(const Dims& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * static_cast<std::size_t>(dims[k]);
  return s;
}

// Full flat indices of every multi-index over `axes`, enumerated row-major
// over those axes, each expressed with the strides of the full space.
inline std::vector<std::size_t> axis_offsets(const Dims& dims, const std::vector<int>& axes) {
  const auto full = strides(dims);
  std::vector<std::size_t> out{0};
  for (int ax : axes) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * static_cast<std::size_t>(dims[ax]));
    for (std::size_t base : out) {
      for (int i = 0; i < dims[ax]; ++i) next.push_back(base + static_cast<std::size_t>(i) * full[ax]);
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace detail

/// Hermitian operator with attached subsystem dimensions (e.g. a square root
/// of a state, whose trace is not one).
struct Operator {
  Matrix matrix;
  Dims dims;

  [[nodiscard]] Eigen::Index dim() const { return matrix.rows(); }
};

class Ket {
 public:
  Ket(Vector amplitudes, Dims dims) : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
    if (detail::product(dims_) != static_cast<std::size_t>(amplitudes_.size())) {
      throw DimensionError("ket dims " + detail::dims_to_string(dims_) +
                           " do not match amplitude count " + std::to_string(amplitudes_.size()));
    }
    detail::check_total_dim(static_cast<std::size_t>(amplitudes_.size()));
    if (std::abs(amplitudes_.squaredNorm() - 1.0) > tol::kKetNorm) {
      throw InvalidStateError("ket is not normalized (squared norm " +
                              std::to_string(amplitudes_.squaredNorm()) + ")");
    }
  }

  /// Normalizes `amplitudes` before validating; rejects the zero vector.
  static Ket normalized(Vector amplitudes, Dims dims) {
    const double n = amplitudes.norm();
    if (n == 0.0) throw InvalidStateError("cannot normalize the zero vector");
    amplitudes /= n;
    return Ket(std::move(amplitudes), std::move(dims));
  }

  [[nodiscard]] const Vector& amplitudes() const { return amplitudes_; }
  [[nodiscard]] const Dims& dims() const { return dims_; }
  [[nodiscard]] Eigen::Index dim() const { return amplitudes_.size(); }

 private:
  Vector amplitudes_;
  Dims dims_;
};

/// Trace-one positive semidefinite operator. Construction validates
/// Hermiticity, trace and the smallest eigenvalue.
class DensityOperator {
 public:
  DensityOperator(Matrix matrix, Dims dims) : matrix_(std::move(matrix)), dims_(std::move(dims)) {
    if (matrix_.rows() != matrix_.cols()) throw DimensionError("density matrix must be square");
    if (detail::product(dims_) != static_cast<std::size_t>(matrix_.rows())) {
      throw DimensionError("dims " + detail::dims_to_string(dims_) + " do not match matrix size " +
                           std::to_string(matrix_.rows()));
    }
    detail::check_total_dim(static_cast<std::size_t>(matrix_.rows()));
    const double herm = detail::max_abs(matrix_ - matrix_.adjoint());
    if (herm > tol::kHermitian) {
      throw InvalidStateError("matrix is not Hermitian (max deviation " + std::to_string(herm) + ")");
    }
    const Complex tr = matrix_.trace();
    if (std::abs(tr - 1.0) > tol::kTrace) {
      throw InvalidStateError("trace is " + std::to_string(tr.real()) + ", expected 1");
    }
    // Symmetrize so downstream eigen-solvers see an exactly Hermitian matrix.
    matrix_ = (0.5 * (matrix_ + matrix_.adjoint())).eval();
    const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(matrix_, Eigen::EigenvaluesOnly)
                            .eigenvalues()
                            .minCoeff();
    if (lmin < -tol::kPsd) {
      throw InvalidStateError("matrix is not positive semidefinite (min eigenvalue " +
                              std::to_string(lmin) + ")");
    }
  }

  /// Builds a state by dividing a PSD matrix by its trace.
  static DensityOperator normalized(const Matrix& m, Dims dims) {
    const double tr = m.trace().real();
    if (!(tr > 0.0)) throw InvalidStateError("cannot normalize a matrix with nonpositive trace");
    return DensityOperator(m / tr, std::move(dims));
  }

  static DensityOperator from_ket(const Ket& psi) {
    return DensityOperator(psi.amplitudes() * psi.amplitudes().adjoint(), psi.dims());
  }

  static DensityOperator maximally_mixed(Dims dims) {
    const auto d = static_cast<Eigen::Index>(detail::product(dims));
    return DensityOperator(Matrix::Identity(d, d) / static_cast<double>(d), std::move(dims));
  }

  [[nodiscard]] const Matrix& matrix() const { return matrix_; }
  [[nodiscard]] const Dims& dims() const { return dims_; }
  [[nodiscard]] Eigen::Index dim() const { return matrix_.rows(); }
  [[nodiscard]] double purity() const { return (matrix_ * matrix_).trace().real(); }

 private:
  Matrix matrix_;
  Dims dims_;
};

struct SchmidtForm {
  RealVector coefficients;  ///< amplitudes s_k, nonincreasing, sum of squares 1
  Matrix left_basis;        ///< columns are the left Schmidt vectors
  Matrix right_basis;       ///< columns are the right Schmidt vectors

  /// Rebuilds sum_k s_k |l_k> (x) |r_k>.
  [[nodiscard]] Vector reconstruct() const {
    const Eigen::Index m = left_basis.rows();
    const Eigen::Index n = right_basis.rows();
    Vector out = Vector::Zero(m * n);
    for (Eigen::Index k = 0; k < coefficients.size(); ++k) {
      for (Eigen::Index i = 0; i < m; ++i) {
        out.segment(i * n, n) += coefficients(k) * left_basis(i, k) * right_basis.col(k);
      }
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Products and traces

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline Dims concat(const Dims& a, const Dims& b) {
  Dims out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  detail::check_total_dim(static_cast<std::size_t>(a.dim() * b.dim()));
  return DensityOperator(kron(a.matrix(), b.matrix()), concat(a.dims(), b.dims()));
}

inline Operator tensor(const Operator& a, const Operator& b) {
  detail::check_total_dim(static_cast<std::size_t>(a.dim() * b.dim()));
  return {kron(a.matrix, b.matrix), concat(a.dims, b.dims)};
}

inline Ket tensor(const Ket& a, const Ket& b) {
  return Ket::normalized(kron(a.amplitudes(), b.amplitudes()), concat(a.dims(), b.dims()));
}

/// Partial trace of a matrix over every subsystem not listed in `keep`.
/// Kept subsystems retain their relative order. An empty `keep` yields the
/// 1x1 full trace.
inline Matrix partial_trace(const Matrix& m, const Dims& dims, std::vector<int> keep) {
  if (detail::product(dims) != static_cast<std::size_t>(m.rows()) || m.rows() != m.cols()) {
    throw DimensionError("partial_trace: dims " + detail::dims_to_string(dims) +
                         " do not match matrix size");
  }
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw DimensionError("partial_trace: duplicate subsystem index");
  }
  for (int k : keep) {
    if (k < 0 || k >= static_cast<int>(dims.size())) {
      throw DimensionError("partial_trace: subsystem index " + std::to_string(k) + " out of range");
    }
  }
  std::vector<int> traced;
  for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
    if (!std::binary_search(keep.begin(), keep.end(), k)) traced.push_back(k);
  }
  const auto kept_off = detail::axis_offsets(dims, keep);
  const auto traced_off = detail::axis_offsets(dims, traced);
  const auto n = static_cast<Eigen::Index>(kept_off.size());
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      Complex acc{0.0, 0.0};
      for (std::size_t t : traced_off) {
        acc += m(static_cast<Eigen::Index>(kept_off[r] + t), static_cast<Eigen::Index>(kept_off[c] + t));
      }
      out(r, c) = acc;
    }
  }
  return out;
}

inline DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep) {
  Dims kept_dims;
  std::vector<int> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  Matrix m = partial_trace(rho.matrix(), rho.dims(), sorted);
  for (int k : sorted) kept_dims.push_back(rho.dims()[k]);
  return DensityOperator(std::move(m), std::move(kept_dims));
}

/// Reorders subsystems: factor k of the output is factor perm[k] of the input.
inline Matrix permute_subsystems(const Matrix& m, const Dims& dims, const std::vector<int>& perm) {
  if (perm.size() != dims.size()) throw DimensionError("permutation length does not match dims");
  std::vector<int> check = perm;
  std::sort(check.begin(), check.end());
  for (int k = 0; k < static_cast<int>(check.size()); ++k) {
    if (check[k] != k) throw DimensionError("invalid subsystem permutation");
  }
  // Offsets of the output's row-major enumeration, measured in input strides.
  const auto map = detail::axis_offsets(dims, perm);
  const auto n = static_cast<Eigen::Index>(map.size());
  Matrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out(r, c) = m(static_cast<Eigen::Index>(map[r]), static_cast<Eigen::Index>(map[c]));
    }
  }
  return out;
}

inline DensityOperator permute_subsystems(const DensityOperator& rho, const std::vector<int>& perm) {
  Matrix m = permute_subsystems(rho.matrix(), rho.dims(), perm);
  Dims dims;
  for (int p : perm) dims.push_back(rho.dims()[p]);
  return DensityOperator(std::move(m), std::move(dims));
}

/// Swaps the two factors of a bipartite state.
inline DensityOperator swap_factors(const DensityOperator& rho) {
  if (rho.dims().size() != 2) throw DimensionError("swap_factors needs a bipartite state");
  return permute_subsystems(rho, {1, 0});
}

/// Conjugates by a product of local unitaries, one per subsystem.
inline DensityOperator local_conjugate(const DensityOperator& rho, const std::vector<Matrix>& unitaries) {
  if (unitaries.size() != rho.dims().size()) throw DimensionError("one unitary per subsystem required");
  Matrix u = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < unitaries.size(); ++k) {
    if (unitaries[k].rows() != rho.dims()[k]) throw DimensionError("local unitary has wrong size");
    u = kron(u, unitaries[k]);
  }
  Matrix out = u * rho.matrix() * u.adjoint();
  return DensityOperator(0.5 * (out + out.adjoint()), rho.dims());
}

// ---------------------------------------------------------------------------
// Spectral tools

/// Hermitian PSD square root. Eigenvalues in [-1e-10, 0) are clipped to zero;
/// anything lower throws NotPsdError. Eigenvalues below the solver's accuracy
/// (d * eps * max|lambda|) are also taken as zero.
inline Matrix sqrt_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  RealVector ev = es.eigenvalues();
  const double floor = static_cast<double>(ev.size()) * std::numeric_limits<double>::epsilon() *
                       (ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol::kPsd) {
      throw NotPsdError("sqrt_psd: eigenvalue " + std::to_string(ev(i)) + " below clipping window");
    }
    ev(i) = ev(i) <= floor ? 0.0 : std::sqrt(ev(i));
  }
  Matrix out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

inline Operator sqrt_psd(const DensityOperator& rho) { return {sqrt_psd(rho.matrix()), rho.dims()}; }

/// Tr(A B) without forming the product.
inline Complex trace_product(const Matrix& a, const Matrix& b) {
  return (a.cwiseProduct(b.transpose())).sum();
}

/// Affinity Tr(sqrt(rho) sqrt(sigma)), clamped to [0, 1] against rounding.
inline double affinity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw DimensionError("affinity: dimension mismatch " + std::to_string(rho.dim()) + " vs " +
                         std::to_string(sigma.dim()));
  }
  const double a = trace_product(sqrt_psd(rho.matrix()), sqrt_psd(sigma.matrix())).real();
  return std::clamp(a, 0.0, 1.0);
}

/// One cluster of (numerically) equal eigenvalues.
struct EigenBlock {
  double eigenvalue;  ///< mean of the merged eigenvalues
  Matrix basis;       ///< orthonormal columns spanning the eigenspace

  [[nodiscard]] Eigen::Index size() const { return basis.cols(); }
};

/// Eigen-decomposes a Hermitian matrix and merges neighbouring eigenvalues
/// whose gap is below 1e-8 * max(1, |lambda|). Blocks are in ascending order.
inline std::vector<EigenBlock> spectral_blocks(const Matrix& m, double rel_gap = tol::kDegeneracy) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  const RealVector& ev = es.eigenvalues();
  const Matrix& vec = es.eigenvectors();
  std::vector<EigenBlock> blocks;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= ev.size(); ++i) {
    const bool split = i == ev.size() ||
                       (ev(i) - ev(i - 1)) >= rel_gap * std::max(1.0, std::abs(ev(i)));
    if (split) {
      const Eigen::Index len = i - start;
      blocks.push_back({ev.segment(start, len).mean(), vec.middleCols(start, len)});
      start = i;
    }
  }
  return blocks;
}

inline bool is_nondegenerate(const Matrix& m) {
  const auto blocks = spectral_blocks(m);
  return std::all_of(blocks.begin(), blocks.end(), [](const EigenBlock& b) { return b.size() == 1; });
}

// ---------------------------------------------------------------------------
// Schmidt decomposition

inline SchmidtForm schmidt(const Ket& psi) {
  if (psi.dims().size() != 2) {
    throw DimensionError("schmidt: expected two factors, got " + std::to_string(psi.dims().size()));
  }
  const int m = psi.dims()[0];
  const int n = psi.dims()[1];
  Matrix amp(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) amp(i, j) = psi.amplitudes()(i * n + j);
  }
  Eigen::JacobiSVD<Matrix> svd(amp, Eigen::ComputeThinU | Eigen::ComputeThinV);
  // amp = U S V^dagger, so the right Schmidt vectors are the conjugated columns of V.
  return {svd.singularValues(), svd.matrixU(), svd.matrixV().conjugate()};
}

}  // namespace nbl
