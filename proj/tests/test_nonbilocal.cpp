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


#include "nbl/nonbilocal.hpp"
#include "nbl/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace nbl;

Vector ket4(double a, double b, double c, double d) {
  Vector v(4);
  v << a, b, c, d;
  return v / v.norm();
}

DensityOperator pure(const Vector& v, Dims dims = {2, 2}) { return DensityOperator::from_ket(Ket(v, std::move(dims))); }

DensityOperator example3_mix() {
  Matrix m = Matrix::Zero(4, 4);
  for (const Vector& v : {ket4(1, 0, 0, 1), ket4(1, 0, 0, -1), ket4(0, 1, 1, 0)}) m += v * v.adjoint() / 3.0;
  return {m, {2, 2}};
}

DensityOperator classical_pair() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = 0.5;
  return {m, {2, 2}};
}

DensityOperator diag_state(std::initializer_list<double> xs) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) m(k, k) = x, ++k;
  return {m, {static_cast<int>(xs.size())}};
}

// For pure inputs the (b,c) marginal has eigenvalues s_i^2 r_j^2 and the
// optimum is its eigenbasis: N = 1 - sum of squared marginal eigenvalues.
double pure_oracle(const Ket& ab, const Ket& cd) {
  const BilocalInput in = BilocalInput::from_kets(ab, cd);
  Eigen::SelfAdjointEigenSolver<Matrix> es(bc_marginal(in).matrix());
  return 1.0 - es.eigenvalues().squaredNorm();
}

BilocalInput locally_rotated(const BilocalInput& in, std::uint64_t seed) {
  const Dims d = in.dims();
  return {local_conjugate(in.rho_ab, {haar_unitary(d[0], seed), haar_unitary(d[1], seed + 1)}),
          local_conjugate(in.rho_cd, {haar_unitary(d[2], seed + 2), haar_unitary(d[3], seed + 3)})};
}

}  // namespace

TEST(Nonbilocal, ProductTimesBellIsHalf) {
  const Ket k00(ket4(1, 0, 0, 0), {2, 2});
  const Ket phi(ket4(1, 0, 0, 1), {2, 2});
  EXPECT_NEAR(nonbilocal_pure(k00, phi), 0.5, 1e-12);
  EXPECT_NEAR(nonbilocal(BilocalInput::from_kets(k00, phi)).value, 0.5, 1e-6);
}

TEST(Nonbilocal, TwoBellStatesIsThreeQuarters) {
  const Ket phi(ket4(1, 0, 0, 1), {2, 2});
  EXPECT_NEAR(nonbilocal_pure(phi, phi), 0.75, 1e-12);
  EXPECT_NEAR(nonbilocal(BilocalInput::from_kets(phi, phi)).value, 0.75, 1e-6);
}

TEST(Nonbilocal, ClassicalPairReachesThreeQuartersAtHadamardStart) {
  const MeasureResult r = nonbilocal(BilocalInput(classical_pair(), classical_pair()));
  EXPECT_GE(r.value, 0.75 - 1e-6);
  bool seen = false;
  for (const auto& s : r.starts) {
    if (s.label == "hadamard") {
      EXPECT_NEAR(s.initial, 0.75, 1e-9);
      seen = true;
    }
    if (s.label == "eigen") EXPECT_NEAR(s.initial, 0.0, 1e-9);
  }
  EXPECT_TRUE(seen);
}

TEST(Nonbilocal, BcMarginalIsPartialTraceOfProduct) {
  const BilocalInput in(random_state(Dims{2, 3}, 3, 1), random_state(Dims{2, 2}, 2, 2));
  const DensityOperator full = tensor(in.rho_ab, in.rho_cd);
  EXPECT_LT((bc_marginal(in).matrix() - partial_trace(full, {1, 2}).matrix()).norm(), 1e-13);
  EXPECT_LT((joint_root(in).matrix - sqrt_psd(full.matrix())).norm(), 1e-9);
}

TEST(NonbilocalProperties, ProductInputsGiveZero) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const BilocalInput in(tensor(random_state(Dims{2}, 2, 4 * s), random_state(Dims{2}, 2, 4 * s + 1)),
                          tensor(random_state(Dims{2}, 2, 4 * s + 2), random_state(Dims{2}, 2, 4 * s + 3)));
    const double v = nonbilocal(in).value;
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1e-8);
  }
}

TEST(NonbilocalProperties, ClassicalQuantumWithNondegenerateMarginalsGiveZero) {
  Matrix a0 = Matrix::Zero(2, 2), a1 = Matrix::Zero(2, 2);
  a0(0, 0) = 1.0, a1(1, 1) = 1.0;
  const DensityOperator q1 = random_state(Dims{2}, 2, 8);
  const DensityOperator q2 = random_state(Dims{2}, 2, 9);
  // rho_ab quantum-classical on b, rho_cd classical-quantum on c.
  const DensityOperator ab(0.7 * kron(q1.matrix(), a0) + 0.3 * kron(q2.matrix(), a1), {2, 2});
  const DensityOperator cd(0.4 * kron(a0, q2.matrix()) + 0.6 * kron(a1, q1.matrix()), {2, 2});
  EXPECT_LT(nonbilocal(BilocalInput(ab, cd)).value, 1e-8);
}

TEST(NonbilocalProperties, InvariantUnderLocalUnitaries) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const BilocalInput in(random_state(Dims{2, 2}, 1 + static_cast<int>(s % 4), 10 * s),
                          random_state(Dims{2, 2}, 1 + static_cast<int>((s + 1) % 4), 10 * s + 1));
    EXPECT_NEAR(nonbilocal(in).value, nonbilocal(locally_rotated(in, 90 + 4 * s)).value, 1e-7) << s;
  }
  const BilocalInput ex3(swap_factors(example3_mix()), example3_mix());
  EXPECT_NEAR(nonbilocal(ex3).value, nonbilocal(locally_rotated(ex3, 5)).value, 1e-7);
}

TEST(NonbilocalProperties, EntangledPureInputsArePositive) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const BilocalInput in = BilocalInput::from_kets(random_ket({2, 2}, 2 * s), random_ket({2, 2}, 2 * s + 1));
    EXPECT_GT(nonbilocal(in).value, 1e-3);
  }
}

TEST(PureClosedForm, MatchesOptimizerAndMarginalOracle) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Dims cd = s % 2 ? Dims{2, 3} : Dims{2, 2};
    const Ket ab = random_ket({2, 2}, 300 + 2 * s);
    const Ket k = random_ket(cd, 301 + 2 * s);
    const double closed = nonbilocal_pure(ab, k);
    EXPECT_NEAR(closed, pure_oracle(ab, k), 1e-10);
    EXPECT_NEAR(closed, nonbilocal(BilocalInput::from_kets(ab, k)).value, 1e-5);
  }
}

TEST(Thm1, EqualBellMixturePairedWithSwap) {
  const Thm1Check t = verify_thm1(example3_mix());
  EXPECT_NEAR(t.rhs, 1.0 / 6.0, 1e-9);
  EXPECT_GE(t.lhs, 5.0 / 12.0 - 1e-6);
  EXPECT_TRUE(t.holds);
}

TEST(Thm1, ProductStateBothSidesZero) {
  const Thm1Check t = verify_thm1(tensor(diag_state({0.8, 0.2}), diag_state({0.3, 0.7})));
  EXPECT_NEAR(t.lhs, 0.0, 1e-9);
  EXPECT_NEAR(t.rhs, 0.0, 1e-9);
  EXPECT_TRUE(t.holds);
}

TEST(Thm1, HoldsOnRandomStates) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Thm1Check t = verify_thm1(random_state(Dims{2, 2}, 1 + static_cast<int>(s % 4), 5000 + s));
    EXPECT_TRUE(t.holds) << s << ": " << t.lhs << " < " << t.rhs;
  }
}

TEST(Thm3, SpectralBoundFromKroneckerEigenvalues) {
  const BilocalInput in(random_state(Dims{2, 2}, 3, 41), random_state(Dims{2, 3}, 4, 42));
  const auto [lab, lcd] = input_lambdas(in);
  Eigen::SelfAdjointEigenSolver<RealMatrix> el(lab.entries.transpose() * lab.entries);
  Eigen::SelfAdjointEigenSolver<RealMatrix> er(lcd.entries * lcd.entries.transpose());
  std::vector<double> products;
  for (Eigen::Index a = 0; a < el.eigenvalues().size(); ++a)
    for (Eigen::Index b = 0; b < er.eigenvalues().size(); ++b) products.push_back(el.eigenvalues()(a) * er.eigenvalues()(b));
  std::sort(products.begin(), products.end());
  double smallest = 0.0;
  for (int k = 0; k < 2 * 2; ++k) smallest += products[static_cast<std::size_t>(k)];
  EXPECT_NEAR(bound_thm3(in), 1.0 - smallest, 1e-12);
}

TEST(Thm3, BoundsNumericValue) {
  const BilocalInput ex3(swap_factors(example3_mix()), example3_mix());
  EXPECT_GE(bound_thm3(ex3), nonbilocal(ex3).value - kBoundSlack);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const BilocalInput in(random_state(Dims{2, 2}, 1 + static_cast<int>(s % 4), 600 + 2 * s),
                          random_state(Dims{2, 2}, 4, 601 + 2 * s));
    EXPECT_LE(nonbilocal(in).value, bound_thm3(in) + kBoundSlack) << s;
  }
}

TEST(Thm4, UndefinedForDegenerateMarginal) {
  EXPECT_FALSE(bound_thm4(BilocalInput(classical_pair(), classical_pair())).has_value());
  EXPECT_FALSE(eigen_affinity_b(example3_mix()).has_value());
}

TEST(Thm4, BoundsNumericValue) {
  const DensityOperator pure_product = tensor(diag_state({1, 0}), diag_state({0.9, 0.1}));
  const BilocalInput a(pure_product, DensityOperator(0.5 * example3_mix().matrix() + 0.5 * Matrix::Identity(4, 4) / 4.0, {2, 2}));
  ASSERT_TRUE(bound_thm4(a).has_value());
  EXPECT_LE(nonbilocal(a).value, *bound_thm4(a) + kBoundSlack);

  const BilocalInput b(random_state(Dims{2, 2}, 4, 77), DensityOperator::maximally_mixed({2, 2}));
  ASSERT_TRUE(bound_thm4(b).has_value());
  EXPECT_LE(nonbilocal(b).value, *bound_thm4(b) + kBoundSlack);

  for (std::uint64_t s = 0; s < 20; ++s) {
    const BilocalInput in(random_state(Dims{2, 2}, 4, 800 + 2 * s), random_state(Dims{2, 2}, 4, 801 + 2 * s));
    const auto bound = bound_thm4(in);
    ASSERT_TRUE(bound.has_value());
    EXPECT_LE(nonbilocal(in).value, *bound + kBoundSlack) << s;
  }
}

TEST(Thm5, PreconditionsEnforced) {
  EXPECT_THROW(thm5_closed(BilocalInput(classical_pair(), random_state(Dims{2, 2}, 4, 1))), PreconditionError);
  EXPECT_THROW(thm5_closed(BilocalInput(random_state(Dims{2, 2}, 4, 1), classical_pair())), PreconditionError);
  EXPECT_THROW(thm5_closed(BilocalInput(random_state(Dims{2, 2}, 4, 1), random_state(Dims{3, 2}, 6, 2))),
               PreconditionError);
}

TEST(Thm5, DirectTermMatchesBlochVectorOracle) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const BilocalInput in(random_state(Dims{2, 2}, 4, 900 + 2 * s), random_state(Dims{2, 2}, 4, 901 + 2 * s));
    const Thm5Result t = thm5_closed(in);
    // Projectors (I +- n.sigma)/2 give Tr(G M G^T) = M_00 + n^T M' n; minimize over unit n.
    const RealMatrix lam = input_lambdas(in).second.entries;
    const RealMatrix gram = lam * lam.transpose();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram.bottomRightCorner(3, 3));
    const double oracle = gram(0, 0) + es.eigenvalues()(0);
    EXPECT_NEAR(t.direct_term, oracle, 1e-8) << s;
    EXPECT_NEAR(t.direct_min_value, 1.0 - t.affinity_b * oracle, 1e-8);
  }
}

TEST(Thm5, ChainBetweenNumericValueAndThm4) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const BilocalInput in(random_state(Dims{2, 2}, 4, 1100 + 2 * s), random_state(Dims{2, 2}, 4, 1101 + 2 * s));
    const Thm5Result t = thm5_closed(in);
    const double v = nonbilocal(in).value;
    EXPECT_LE(v, t.direct_min_value + kBoundSlack) << s;
    EXPECT_LE(t.direct_min_value, *bound_thm4(in) + kBoundSlack) << s;
  }
}

TEST(Thm5, ReportsDiscrepancyBetweenPrintedAndDirectForms) {
  const BilocalInput in(random_state(Dims{2, 2}, 4, 7), random_state(Dims{2, 2}, 4, 8));
  const Thm5Result t = thm5_closed(in);
  EXPECT_EQ(t.discrepancy, std::abs(t.closed_value - t.direct_min_value) > 1e-6);
  EXPECT_TRUE(t.discrepancy);
}

TEST(BoundReport, OrderingHoldsOnRandomInputs) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const BilocalInput in(random_state(Dims{2, 2}, 4, 1300 + 2 * s), random_state(Dims{2, 2}, 4, 1301 + 2 * s));
    const BoundReport r = bound_report(in, nonbilocal(in).value);
    EXPECT_TRUE(r.ordering_ok);
    EXPECT_TRUE(r.thm5.has_value());
  }
}

TEST(Nonbilocal, DimensionCapEnforced) {
  const BilocalInput in(DensityOperator::maximally_mixed({9, 8}), DensityOperator::maximally_mixed({8, 8}));
  EXPECT_THROW(nonbilocal(in), DimensionCapError);
}
