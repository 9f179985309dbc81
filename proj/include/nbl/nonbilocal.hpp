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
 * @file nonbilocal.hpp
 * @brief Affinity-based nonbilocality of a product of two bipartite states.
 *
 * For inputs rho_ab (dims m,n) and rho_cd (dims u,v) on factors (a,b,c,d),
 *
 *   N(rho_ab (x) rho_cd) = max_Pi 1 - Tr[S Pi(S)],  S = sqrt(rho_ab) (x) sqrt(rho_cd),
 *
 * where Pi ranges over rank-1 measurements on (b,c) leaving
 * rho_bc = Tr_ad(rho_ab (x) rho_cd) invariant. Also provided: the closed form
 * for pure inputs, the comparison against affinity-based MIN of a state
 * paired with its own swap, and the spectral upper bounds built from the
 * Lambda matrices of the two square roots.
 */

#include "nbl/hilbert.hpp"
#include "nbl/measurement.hpp"
#include "nbl/measures.hpp"
#include "nbl/operator_basis.hpp"
#include "nbl/optimize.hpp"

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace nbl {

/// Margin used by the ordering and Theorem-1 style checks.
inline constexpr double kBoundSlack = 1e-7;
inline constexpr double kInequalitySlack = 1e-6;

struct BilocalInput {
  DensityOperator rho_ab;
  DensityOperator rho_cd;

  BilocalInput(DensityOperator ab, DensityOperator cd) : rho_ab(std::move(ab)), rho_cd(std::move(cd)) {
    if (rho_ab.dims().size() != 2 || rho_cd.dims().size() != 2) {
      throw DimensionError("bilocal inputs must both be bipartite");
    }
  }

  static BilocalInput from_kets(const Ket& ab, const Ket& cd) {
    return {DensityOperator::from_ket(ab), DensityOperator::from_ket(cd)};
  }

  /// (m, n, u, v).
  [[nodiscard]] Dims dims() const { return concat(rho_ab.dims(), rho_cd.dims()); }
  [[nodiscard]] std::size_t total_dim() const { return detail::product(dims()); }
};

/// Tr_ad(rho_ab (x) rho_cd) on factors (b, c).
inline DensityOperator bc_marginal(const BilocalInput& in) {
  return tensor(partial_trace(in.rho_ab, {1}), partial_trace(in.rho_cd, {0}));
}

/// sqrt(rho_ab (x) rho_cd), assembled as sqrt(rho_ab) (x) sqrt(rho_cd).
inline Operator joint_root(const BilocalInput& in) { return tensor(sqrt_psd(in.rho_ab), sqrt_psd(in.rho_cd)); }

inline InvariantMeasurementFamily bc_family(const BilocalInput& in) { return eigen_family(bc_marginal(in), {1, 2}); }

inline MeasureResult nonbilocal(const BilocalInput& in, const OptimizerConfig& config = {},
                                const std::vector<LabeledSeed>& extra_seeds = {}) {
  detail::check_total_dim(in.total_dim());
  MeasureResult r = optimize(affinity_disturbance(joint_root(in)), bc_family(in), Mode::Max, config, extra_seeds);
  if (!(r.value >= 0.0)) throw std::logic_error("nonbilocal: negative value");
  return r;
}

/// 1 - (sum_i s_i^4)(sum_j r_j^4) with Schmidt amplitudes s, r.
inline double nonbilocal_pure(const Ket& psi_ab, const Ket& psi_cd) {
  auto quartic = [](const Ket& psi) { return schmidt(psi).coefficients.array().pow(4).sum(); };
  return 1.0 - quartic(psi_ab) * quartic(psi_cd);
}

struct Thm1Check {
  double lhs = 0.0;  ///< N(rho_ba (x) rho_ab)
  double rhs = 0.0;  ///< affinity-based MIN of rho
  bool holds = false;
  MeasureResult nonbilocal_result;
  MeasureResult min_result;
};

/// Compares N(swap(rho) (x) rho) against affinity_min(rho). The product of
/// the MIN-optimal measurement with itself is passed as an extra start since
/// it lies in the (b,c) family.
inline Thm1Check verify_thm1(const DensityOperator& rho, const OptimizerConfig& config = {}) {
  if (rho.dims().size() != 2) throw DimensionError("verify_thm1: expected a bipartite state");
  Thm1Check out;
  out.min_result = affinity_min(rho, config);
  const BilocalInput in(swap_factors(rho), rho);
  const Matrix v = out.min_result.optimal_measurement.vectors();
  const int m = rho.dims()[0];
  std::vector<LabeledSeed> seeds{{"min-product", ProjectiveMeasurement::from_basis({1, 2}, {m, m}, kron(v, v))}};
  out.nonbilocal_result = nonbilocal(in, config, seeds);
  out.lhs = out.nonbilocal_result.value;
  out.rhs = out.min_result.value;
  out.holds = out.lhs >= out.rhs - kInequalitySlack;
  return out;
}

/// Lambda matrices of both inputs in Gell-Mann bases of their own dimensions.
inline std::pair<LambdaMatrix, LambdaMatrix> input_lambdas(const BilocalInput& in) {
  const Dims d = in.dims();
  return {lambda_of(in.rho_ab, build_basis(d[0]), build_basis(d[1]), LambdaKind::AB),
          lambda_of(in.rho_cd, build_basis(d[2]), build_basis(d[3]), LambdaKind::CD)};
}

/// 1 minus the sum of the n*u smallest eigenvalues of J J^T.
inline double bound_thm3(const BilocalInput& in) {
  const auto [lab, lcd] = input_lambdas(in);
  const LambdaMatrix joint = joint_lambda(lab, lcd);
  const RealVector mu = gram_eigenvalues(joint.entries);
  const Dims d = in.dims();
  const Eigen::Index outcomes = static_cast<Eigen::Index>(d[1]) * d[2];
  return 1.0 - mu.head(outcomes).sum();
}

/// Tr(sqrt(rho_ab) Pi_b(sqrt(rho_ab))) with Pi_b the eigen-measurement of a
/// nondegenerate rho_b; nullopt when rho_b is degenerate.
inline std::optional<double> eigen_affinity_b(const DensityOperator& rho_ab) {
  const auto family = eigen_family(partial_trace(rho_ab, {1}), {1});
  if (!family.is_point()) return std::nullopt;
  const std::vector<double> zeros(static_cast<std::size_t>(family.parameter_count), 0.0);
  return overlap(sqrt_psd(rho_ab), measurement_at(family, zeros));
}

/// 1 - A_b * (sum of the u smallest eigenvalues of Lcd Lcd^T). Undefined
/// (nullopt) when rho_b is degenerate.
inline std::optional<double> bound_thm4(const BilocalInput& in) {
  const auto ab = eigen_affinity_b(in.rho_ab);
  if (!ab) return std::nullopt;
  const LambdaMatrix lcd = input_lambdas(in).second;
  const RealVector mu = gram_eigenvalues(lcd.entries);
  return 1.0 - *ab * mu.head(in.rho_cd.dims()[0]).sum();
}

struct Thm5Result {
  double closed_value = 0.0;      ///< 1 - A_b (||lambda_cd|| + lambda_min), as printed
  double direct_min_value = 0.0;  ///< 1 - A_b min_C Tr(C Lcd Lcd^T C^T)
  double affinity_b = 0.0;
  double printed_term = 0.0;  ///< ||lambda_cd|| + lambda_min
  double direct_term = 0.0;   ///< min_C Tr(C Lcd Lcd^T C^T)
  bool discrepancy = false;   ///< |closed_value - direct_min_value| > 1e-6
  MeasureResult direct;       ///< optimizer record for the qubit measurement on c
};

/// Closed expression next to the direct minimization over every qubit
/// measurement on c. Requires nondegenerate rho_b and rho_c and u = 2.
inline Thm5Result thm5_closed(const BilocalInput& in, const OptimizerConfig& config = {}) {
  if (in.rho_cd.dims()[0] != 2) throw PreconditionError("thm5_closed: subsystem c must be a qubit");
  if (!is_nondegenerate(partial_trace(in.rho_cd, {0}).matrix())) {
    throw PreconditionError("thm5_closed: marginal rho_c is degenerate");
  }
  const auto ab = eigen_affinity_b(in.rho_ab);
  if (!ab) throw PreconditionError("thm5_closed: marginal rho_b is degenerate");

  const LambdaMatrix lcd = input_lambdas(in).second;
  const RealMatrix& lam = lcd.entries;
  const RealMatrix lower = lam.bottomRows(lam.rows() - 1);
  const double lambda_min = gram_eigenvalues(lower)(0);

  Thm5Result out;
  out.affinity_b = *ab;
  out.printed_term = lam.row(0).norm() + lambda_min;
  out.closed_value = 1.0 - out.affinity_b * out.printed_term;

  // Every qubit basis: a single two-dimensional block.
  InvariantMeasurementFamily all_qubit;
  all_qubit.target = {0};
  all_qubit.target_dims = {2};
  all_qubit.marginal = Matrix::Identity(2, 2) / 2.0;
  all_qubit.blocks = {EigenBlock{0.5, Matrix::Identity(2, 2)}};
  all_qubit.parameter_count = 4;

  const RealMatrix gram = lam * lam.transpose();
  const std::vector<HermitianBasis> cbasis{build_basis(2)};
  auto objective = [gram, cbasis](const ProjectiveMeasurement& m) {
    return gamma_overlap(gamma_of(m, cbasis), gram);
  };
  out.direct = optimize(objective, all_qubit, Mode::Min, config);
  out.direct_term = out.direct.value;
  out.direct_min_value = 1.0 - out.affinity_b * out.direct_term;
  out.discrepancy = std::abs(out.closed_value - out.direct_min_value) > 1e-6;
  return out;
}

struct BoundReport {
  double value_numeric = 0.0;
  double thm3_upper = 0.0;
  std::optional<double> thm4_upper;
  std::optional<Thm5Result> thm5;
  bool ordering_ok = false;
};

inline BoundReport bound_report(const BilocalInput& in, double value_numeric, const OptimizerConfig& config = {}) {
  BoundReport r;
  r.value_numeric = value_numeric;
  r.thm3_upper = bound_thm3(in);
  r.thm4_upper = bound_thm4(in);
  try {
    r.thm5 = thm5_closed(in, config);
  } catch (const PreconditionError&) {
    r.thm5.reset();
  }
  r.ordering_ok = value_numeric <= r.thm3_upper + kBoundSlack &&
                  (!r.thm4_upper || value_numeric <= *r.thm4_upper + kBoundSlack);
  return r;
}

}  // namespace nbl
