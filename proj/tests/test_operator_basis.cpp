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


#include "nbl/operator_basis.hpp"
#include "nbl/random.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace {

using namespace nbl;

const Complex I{0.0, 1.0};

Matrix pauli(int k) {
  Matrix m = Matrix::Zero(2, 2);
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -I, I, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

Matrix diag4(double a, double b, double c, double d) {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = a, m(1, 1) = b, m(2, 2) = c, m(3, 3) = d;
  return m;
}

Vector bell_phi_plus() {
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace

TEST(Basis, QubitIsScaledPaulis) {
  const HermitianBasis b = build_basis(2);
  ASSERT_EQ(b.elements.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_LT((b.elements[k] - pauli(k) / std::sqrt(2.0)).norm(), 1e-15) << k;
}

TEST(Basis, QutritIsOrthonormalHermitianAndTraceless) {
  const HermitianBasis b = build_basis(3);
  ASSERT_EQ(b.elements.size(), 9u);
  EXPECT_LT((b.elements[0] - Matrix::Identity(3, 3) / std::sqrt(3.0)).norm(), 1e-15);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_LT((b.elements[i] - b.elements[i].adjoint()).norm(), 1e-15);
    if (i > 0) EXPECT_NEAR(std::abs(b.elements[i].trace()), 0.0, 1e-15);
    for (std::size_t j = 0; j < 9; ++j) {
      EXPECT_NEAR(std::abs(trace_product(b.elements[i], b.elements[j]) - Complex(i == j ? 1.0 : 0.0)), 0.0, 1e-14);
    }
  }
}

TEST(Basis, CompleteForHermitianOperators) {
  Rng rng(5);
  for (int d : {2, 3, 4}) {
    const HermitianBasis b = build_basis(d);
    const Matrix h = random_hermitian(d, rng);
    const RealVector c = coordinates(h, b);
    Matrix back = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < b.elements.size(); ++k) back += c(static_cast<Eigen::Index>(k)) * b.elements[k];
    EXPECT_LT((back - h).norm(), 1e-12) << d;
  }
}

TEST(Basis, RejectsDimensionBelowTwo) {
  EXPECT_THROW(build_basis(1), DimensionError);
  EXPECT_THROW(build_basis(0), DimensionError);
}

TEST(Lambda, ClassicalPairHasTwoEntries) {
  const DensityOperator c(diag4(0.5, 0, 0, 0.5), {2, 2});
  const LambdaMatrix lam = lambda_of(c);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const bool hit = (i == 0 && j == 0) || (i == 3 && j == 3);
      EXPECT_NEAR(lam.entries(i, j), hit ? 1.0 / std::sqrt(2.0) : 0.0, 1e-12) << i << "," << j;
    }
  }
}

TEST(Lambda, MaximallyMixedHasOnlyIdentityEntry) {
  const LambdaMatrix lam = lambda_of(DensityOperator::maximally_mixed({2, 3}));
  EXPECT_NEAR(lam.entries(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(lam.entries.norm(), 1.0, 1e-12);
}

TEST(Lambda, BellStateMatchesPauliCorrelations) {
  const Vector phi = bell_phi_plus();
  const LambdaMatrix lam = lambda_of(DensityOperator::from_ket(Ket(phi, {2, 2})));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double corr = (phi.adjoint() * kron(pauli(i), pauli(j)) * phi)(0, 0).real() / 2.0;
      EXPECT_NEAR(lam.entries(i, j), corr, 1e-7) << i << "," << j;
    }
  }
  EXPECT_NEAR(lam.entries(0, 0), 0.5, 1e-7);
  EXPECT_NEAR(lam.entries(1, 1), 0.5, 1e-7);
  EXPECT_NEAR(lam.entries(2, 2), -0.5, 1e-7);
  EXPECT_NEAR(lam.entries(3, 3), 0.5, 1e-7);
}

TEST(Lambda, UnitFrobeniusNormAndReconstruction) {
  for (std::uint64_t s = 0; s < 25; ++s) {
    const Dims dims = s % 2 ? Dims{2, 3} : Dims{2, 2};
    const DensityOperator rho = random_state(dims, 1 + static_cast<int>(s % 4), s);
    const HermitianBasis l = build_basis(dims[0]);
    const HermitianBasis r = build_basis(dims[1]);
    const LambdaMatrix lam = lambda_of(rho, l, r);
    EXPECT_NEAR(lam.entries.squaredNorm(), 1.0, 1e-9);
    EXPECT_LT((reconstruct(lam, l, r) - sqrt_psd(rho.matrix())).norm(), 1e-9);
  }
}

TEST(Lambda, DimensionMismatchThrows) {
  const DensityOperator rho = random_state(Dims{2, 3}, 2, 1);
  EXPECT_THROW(lambda_of(rho, build_basis(2), build_basis(2)), DimensionError);
}

TEST(JointLambda, ClassicalPairHasFourHalfEntries) {
  const DensityOperator c(diag4(0.5, 0, 0, 0.5), {2, 2});
  const LambdaMatrix j = joint_lambda(lambda_of(c, LambdaKind::AB), lambda_of(c, LambdaKind::CD));
  ASSERT_EQ(j.entries.rows(), 16);
  ASSERT_EQ(j.entries.cols(), 16);
  int hits = 0;
  for (int r = 0; r < 16; ++r) {
    for (int col = 0; col < 16; ++col) {
      const bool hit = r == col && (r == 0 || r == 3 || r == 12 || r == 15);
      hits += std::abs(j.entries(r, col)) > 1e-12;
      EXPECT_NEAR(j.entries(r, col), hit ? 0.5 : 0.0, 1e-12) << r << "," << col;
    }
  }
  EXPECT_EQ(hits, 4);
}

TEST(JointLambda, NormIsProductAndGramFactorizes) {
  const DensityOperator ab = random_state(Dims{2, 3}, 3, 21);
  const DensityOperator cd = random_state(Dims{2, 2}, 2, 22);
  const LambdaMatrix lab = lambda_of(ab, LambdaKind::AB);
  const LambdaMatrix lcd = lambda_of(cd, LambdaKind::CD);
  const LambdaMatrix j = joint_lambda(lab, lcd);
  EXPECT_NEAR(j.entries.norm(), lab.entries.norm() * lcd.entries.norm(), 1e-12);

  const RealMatrix left = lab.entries.transpose() * lab.entries;
  const RealMatrix right = lcd.entries * lcd.entries.transpose();
  RealMatrix expected(left.rows() * right.rows(), left.cols() * right.cols());
  for (Eigen::Index a = 0; a < left.rows(); ++a)
    for (Eigen::Index b = 0; b < left.cols(); ++b)
      expected.block(a * right.rows(), b * right.cols(), right.rows(), right.cols()) = left(a, b) * right;
  EXPECT_LT((j.entries * j.entries.transpose() - expected).norm(), 1e-12);

  Eigen::SelfAdjointEigenSolver<RealMatrix> el(left), er(right);
  std::vector<double> products;
  for (Eigen::Index a = 0; a < el.eigenvalues().size(); ++a)
    for (Eigen::Index b = 0; b < er.eigenvalues().size(); ++b) products.push_back(el.eigenvalues()(a) * er.eigenvalues()(b));
  std::sort(products.begin(), products.end());
  const RealVector mu = gram_eigenvalues(j.entries);
  for (Eigen::Index k = 0; k < mu.size(); ++k) EXPECT_NEAR(mu(k), products[static_cast<std::size_t>(k)], 1e-12);
  EXPECT_NEAR(mu.sum(), 1.0, 1e-9);
}

TEST(JointLambda, RankOneInputsGiveRankOneJoint) {
  const DensityOperator c(diag4(1, 0, 0, 0), {2, 2});
  const LambdaMatrix j = joint_lambda(lambda_of(c, LambdaKind::AB), lambda_of(c, LambdaKind::CD));
  const RealVector mu = gram_eigenvalues(j.entries);
  EXPECT_NEAR(mu(mu.size() - 1), 1.0, 1e-12);
  EXPECT_NEAR(mu.head(mu.size() - 1).sum(), 0.0, 1e-12);
}

TEST(JointLambda, RequiresMatchingKinds) {
  const DensityOperator c = DensityOperator::maximally_mixed({2, 2});
  EXPECT_THROW(joint_lambda(lambda_of(c, LambdaKind::CD), lambda_of(c, LambdaKind::CD)), std::invalid_argument);
}

TEST(Gamma, ComputationalBasisEntriesAreDiagonalProducts) {
  const auto meas = ProjectiveMeasurement::from_basis({0, 1}, {2, 2}, Matrix::Identity(4, 4));
  const HermitianBasis q = build_basis(2);
  const GammaMatrix g = gamma_of(meas, q, q);
  ASSERT_EQ(g.entries.rows(), 4);
  ASSERT_EQ(g.entries.cols(), 16);
  for (int h = 0; h < 4; ++h) {
    const int x = h / 2, y = h % 2;
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        EXPECT_NEAR(g.entries(h, j * 4 + k), (q.elements[j](x, x) * q.elements[k](y, y)).real(), 1e-14);
  }
}

TEST(Gamma, RowsAreOrthonormal) {
  const HermitianBasis q = build_basis(2);
  for (const Matrix& basis : {bell_basis(), hadamard_product_basis(), haar_unitary(4, 3)}) {
    const auto meas = ProjectiveMeasurement::from_basis({0, 1}, {2, 2}, basis);
    const GammaMatrix g = gamma_of(meas, q, q);
    EXPECT_LT((g.entries * g.entries.transpose() - RealMatrix::Identity(4, 4)).norm(), 1e-12);
  }
}

TEST(Gamma, RejectsHigherRankAndWrongDimension) {
  auto meas = ProjectiveMeasurement::from_basis({0}, {2}, Matrix::Identity(2, 2));
  EXPECT_THROW(gamma_of(meas, build_basis(2), build_basis(2)), DimensionError);
  meas.projectors = {Matrix::Identity(2, 2)};
  const std::vector<HermitianBasis> one{build_basis(2)};
  EXPECT_THROW(gamma_of(meas, one), std::invalid_argument);
}

TEST(Gamma, OverlapIdentityMatchesDirectApplication) {
  const HermitianBasis q = build_basis(2);
  for (std::uint64_t s = 0; s < 30; ++s) {
    const DensityOperator ab = random_state(Dims{2, 2}, 1 + static_cast<int>(s % 4), 2 * s);
    const DensityOperator cd = random_state(Dims{2, 2}, 1 + static_cast<int>((s + 2) % 4), 2 * s + 1);
    const LambdaMatrix j = joint_lambda(lambda_of(ab, LambdaKind::AB), lambda_of(cd, LambdaKind::CD));
    const RealMatrix jjt = j.entries * j.entries.transpose();
    const auto meas = ProjectiveMeasurement::from_basis({1, 2}, {2, 2}, haar_unitary(4, 100 + s));

    // Direct: sum_h Tr[(S P_h)^2] with P_h embedded as I (x) P_h (x) I.
    const Matrix root = kron(sqrt_psd(ab.matrix()), sqrt_psd(cd.matrix()));
    double direct = 0.0;
    for (const Matrix& p : meas.projectors) {
      const Matrix big = kron(kron(Matrix::Identity(2, 2), p), Matrix::Identity(2, 2));
      direct += (root * big * root * big).trace().real();
    }
    EXPECT_NEAR(gamma_overlap(gamma_of(meas, q, q), jjt), direct, 1e-8) << s;
  }
}
