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
 * @file operator_basis.hpp
 * @brief Orthonormal Hermitian operator bases and the real coefficient
 * matrices of square-root states expanded in them.
 *
 * A bipartite square root expands as sqrt(rho_ab) = sum_ij L(i,j) X_i (x) Y_j
 * with Tr(X_k X_l) = delta_kl. For a pair of inputs the joint matrix is
 * indexed by rows (j,k) and columns (i,l), both row-major, so that with
 * G(h,(j,k)) = Tr(Pi_h (Y_j (x) P_k)) the measured overlap of the product
 * square root is Tr(G J J^T G^T).
 */

#include "nbl/hilbert.hpp"
#include "nbl/measurement.hpp"

#include <span>
#include <string>
#include <vector>

namespace nbl {

struct HermitianBasis {
  int dim = 0;
  std::vector<Matrix> elements;  ///< dim^2 entries, element 0 is I/sqrt(dim)
  std::vector<std::string> names;
};

/// Identity/sqrt(d) followed by the generalized Gell-Mann matrices scaled to
/// unit Hilbert-Schmidt norm: symmetric pairs, antisymmetric pairs, then
/// diagonals, each in lexicographic order. For d = 2 this is
/// {I, sigma_x, sigma_y, sigma_z} / sqrt(2).
inline HermitianBasis build_basis(int d) {
  if (d < 2) throw DimensionError("build_basis: dimension must be at least 2, got " + std::to_string(d));
  HermitianBasis basis;
  basis.dim = d;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  basis.elements.push_back(Matrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
  basis.names.emplace_back("I");
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      Matrix s = Matrix::Zero(d, d);
      s(j, k) = s(k, j) = inv_sqrt2;
      basis.elements.push_back(std::move(s));
      basis.names.push_back("S" + std::to_string(j) + std::to_string(k));
    }
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      Matrix a = Matrix::Zero(d, d);
      a(j, k) = Complex(0.0, -inv_sqrt2);
      a(k, j) = Complex(0.0, inv_sqrt2);
      basis.elements.push_back(std::move(a));
      basis.names.push_back("A" + std::to_string(j) + std::to_string(k));
    }
  }
  for (int l = 1; l < d; ++l) {
    const double f = std::sqrt(1.0 / (l * (l + 1.0)));
    Matrix z = Matrix::Zero(d, d);
    for (int j = 0; j < l; ++j) z(j, j) = f;
    z(l, l) = -l * f;
    basis.elements.push_back(std::move(z));
    basis.names.push_back("D" + std::to_string(l));
  }
  return basis;
}

/// Real coefficients Tr(A X_k) of a Hermitian operator.
inline RealVector coordinates(const Matrix& a, const HermitianBasis& basis) {
  RealVector c(static_cast<Eigen::Index>(basis.elements.size()));
  for (std::size_t k = 0; k < basis.elements.size(); ++k) {
    c(static_cast<Eigen::Index>(k)) = trace_product(a, basis.elements[k]).real();
  }
  return c;
}

enum class LambdaKind { AB, CD, Joint };

struct LambdaMatrix {
  RealMatrix entries;
  LambdaKind kind = LambdaKind::AB;
  Dims dims;  ///< (m, n) for AB/CD; (m, n, u, v) for Joint
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
};

/// Coefficient matrix of a square-root operator in basisL (x) basisR.
inline LambdaMatrix lambda_of(const Operator& root, const HermitianBasis& left, const HermitianBasis& right,
                              LambdaKind kind = LambdaKind::AB) {
  if (root.dims.size() != 2 || root.dims[0] != left.dim || root.dims[1] != right.dim) {
    throw DimensionError("lambda_of: operator dims " + detail::dims_to_string(root.dims) +
                         " do not match bases (" + std::to_string(left.dim) + "," +
                         std::to_string(right.dim) + ")");
  }
  if (kind == LambdaKind::Joint) throw std::invalid_argument("lambda_of: use joint_lambda for Joint");
  const auto rows = static_cast<Eigen::Index>(left.elements.size());
  const auto cols = static_cast<Eigen::Index>(right.elements.size());
  LambdaMatrix out;
  out.kind = kind;
  out.dims = root.dims;
  out.entries.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      out.entries(i, j) = trace_product(root.matrix, kron(left.elements[i], right.elements[j])).real();
    }
  }
  const char* lp = kind == LambdaKind::AB ? "X" : "P";
  const char* rp = kind == LambdaKind::AB ? "Y" : "Q";
  for (Eigen::Index i = 0; i < rows; ++i) out.row_labels.push_back(lp + std::to_string(i));
  for (Eigen::Index j = 0; j < cols; ++j) out.col_labels.push_back(rp + std::to_string(j));
  return out;
}

inline LambdaMatrix lambda_of(const DensityOperator& rho, const HermitianBasis& left, const HermitianBasis& right,
                              LambdaKind kind = LambdaKind::AB) {
  return lambda_of(sqrt_psd(rho), left, right, kind);
}

/// Convenience overload with Gell-Mann bases of the state's own dimensions.
inline LambdaMatrix lambda_of(const DensityOperator& rho, LambdaKind kind = LambdaKind::AB) {
  if (rho.dims().size() != 2) throw DimensionError("lambda_of: state must be bipartite");
  return lambda_of(rho, build_basis(rho.dims()[0]), build_basis(rho.dims()[1]), kind);
}

/// sum_ij L(i,j) X_i (x) Y_j.
inline Matrix reconstruct(const LambdaMatrix& lam, const HermitianBasis& left, const HermitianBasis& right) {
  const Eigen::Index d = static_cast<Eigen::Index>(left.dim) * right.dim;
  Matrix out = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < lam.entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < lam.entries.cols(); ++j) {
      if (lam.entries(i, j) != 0.0) out += lam.entries(i, j) * kron(left.elements[i], right.elements[j]);
    }
  }
  return out;
}

/// Rearranged outer product J((j,k),(i,l)) = Lab(i,j) * Lcd(k,l).
inline LambdaMatrix joint_lambda(const LambdaMatrix& lab, const LambdaMatrix& lcd) {
  if (lab.kind != LambdaKind::AB || lcd.kind != LambdaKind::CD) {
    throw std::invalid_argument("joint_lambda: expected kinds AB and CD");
  }
  const Eigen::Index m2 = lab.entries.rows();
  const Eigen::Index n2 = lab.entries.cols();
  const Eigen::Index u2 = lcd.entries.rows();
  const Eigen::Index v2 = lcd.entries.cols();
  LambdaMatrix out;
  out.kind = LambdaKind::Joint;
  out.dims = concat(lab.dims, lcd.dims);
  out.entries.resize(n2 * u2, m2 * v2);
  for (Eigen::Index j = 0; j < n2; ++j) {
    for (Eigen::Index k = 0; k < u2; ++k) {
      for (Eigen::Index i = 0; i < m2; ++i) {
        for (Eigen::Index l = 0; l < v2; ++l) {
          out.entries(j * u2 + k, i * v2 + l) = lab.entries(i, j) * lcd.entries(k, l);
        }
      }
    }
  }
  for (Eigen::Index j = 0; j < n2; ++j) {
    for (Eigen::Index k = 0; k < u2; ++k) out.row_labels.push_back("Y" + std::to_string(j) + ".P" + std::to_string(k));
  }
  for (Eigen::Index i = 0; i < m2; ++i) {
    for (Eigen::Index l = 0; l < v2; ++l) out.col_labels.push_back("X" + std::to_string(i) + ".Q" + std::to_string(l));
  }
  return out;
}

struct GammaMatrix {
  RealMatrix entries;  ///< outcomes x composite basis index
};

/// G(h, (j,k,...)) = Tr(Pi_h (B1_j (x) B2_k (x) ...)) for a rank-1 measurement
/// on the product of the given factor bases.
inline GammaMatrix gamma_of(const ProjectiveMeasurement& meas, std::span<const HermitianBasis> bases) {
  if (!meas.is_rank_one()) throw std::invalid_argument("gamma_of: measurement has an outcome of rank > 1");
  Eigen::Index space = 1;
  for (const auto& b : bases) space *= b.dim;
  if (space != meas.space_dim()) {
    throw DimensionError("gamma_of: bases span dimension " + std::to_string(space) +
                         " but measurement acts on " + std::to_string(meas.space_dim()));
  }
  // Composite basis elements in row-major order over the factors.
  std::vector<Matrix> composite{Matrix::Identity(1, 1)};
  for (const auto& b : bases) {
    std::vector<Matrix> next;
    next.reserve(composite.size() * b.elements.size());
    for (const auto& c : composite) {
      for (const auto& e : b.elements) next.push_back(kron(c, e));
    }
    composite = std::move(next);
  }
  GammaMatrix g;
  g.entries.resize(static_cast<Eigen::Index>(meas.projectors.size()), static_cast<Eigen::Index>(composite.size()));
  for (std::size_t h = 0; h < meas.projectors.size(); ++h) {
    for (std::size_t c = 0; c < composite.size(); ++c) {
      g.entries(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(c)) =
          trace_product(meas.projectors[h], composite[c]).real();
    }
  }
  return g;
}

inline GammaMatrix gamma_of(const ProjectiveMeasurement& meas, const HermitianBasis& b, const HermitianBasis& c) {
  const std::vector<HermitianBasis> bases{b, c};
  return gamma_of(meas, bases);
}

/// Tr(G J J^T G^T).
inline double gamma_overlap(const GammaMatrix& gamma, const RealMatrix& jjt) {
  return (gamma.entries * jjt * gamma.entries.transpose()).trace();
}

/// Ascending eigenvalues of L L^T.
inline RealVector gram_eigenvalues(const RealMatrix& lam) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(lam * lam.transpose(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace nbl
