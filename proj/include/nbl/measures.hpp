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

// Bipartite measures over rank-1 measurements on the first factor that leave
// its marginal invariant:
//   hs_min             max ||rho - Pi(rho)||_F^2
//   geometric_discord  min ||rho - Pi(rho)||_F^2
//   affinity_min       max 1 - Tr(sqrt(rho) Pi(sqrt(rho)))
// Because Pi is an orthogonal projection in Hilbert-Schmidt space,
// ||rho - Pi(rho)||^2 = Tr(rho^2) - Tr(rho Pi(rho)).

#include "nbl/hilbert.hpp"
#include "nbl/measurement.hpp"
#include "nbl/optimize.hpp"

#include <algorithm>

namespace nbl {

namespace detail {

inline void require_bipartite(const DensityOperator& rho, const char* who) {
  if (rho.dims().size() != 2) {
    throw DimensionError(std::string(who) + ": expected a bipartite state, got dims " + dims_to_string(rho.dims()));
  }
}

inline InvariantMeasurementFamily first_factor_family(const DensityOperator& rho) {
  return eigen_family(partial_trace(rho, {0}), {0});
}

inline MeasureResult hs_disturbance(const DensityOperator& rho, Mode mode, const OptimizerConfig& config) {
  const Operator op{rho.matrix(), rho.dims()};
  const double purity = rho.purity();
  auto objective = [op, purity](const ProjectiveMeasurement& m) { return std::max(0.0, purity - overlap(op, m)); };
  return optimize(objective, first_factor_family(rho), mode, config);
}

}  // namespace detail

/// 1 - Tr(sqrt(rho) Pi(sqrt(rho))) as an objective over measurements.
inline Objective affinity_disturbance(Operator root) {
  return [root = std::move(root)](const ProjectiveMeasurement& m) { return std::max(0.0, 1.0 - overlap(root, m)); };
}

inline MeasureResult hs_min(const DensityOperator& rho, const OptimizerConfig& config = {}) {
  detail::require_bipartite(rho, "hs_min");
  return detail::hs_disturbance(rho, Mode::Max, config);
}

inline MeasureResult geometric_discord(const DensityOperator& rho, const OptimizerConfig& config = {}) {
  detail::require_bipartite(rho, "geometric_discord");
  return detail::hs_disturbance(rho, Mode::Min, config);
}

inline MeasureResult affinity_min(const DensityOperator& rho, const OptimizerConfig& config = {}) {
  detail::require_bipartite(rho, "affinity_min");
  return optimize(affinity_disturbance(sqrt_psd(rho)), detail::first_factor_family(rho), Mode::Max, config);
}

}  // namespace nbl
