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
 * @file optimize.hpp
 * @brief Multi-start derivative-free search over an invariant measurement
 * family.
 *
 * Every start is a point W = (W_b) of block unitaries. Refinement is a
 * compass search on the local chart W_b * exp(i H_b(p)) around p = 0; after
 * each improving sweep the chart is re-centred on the new point. Starts are
 * the eigenbasis, the Bell and Hadamard-product bases when the measured
 * space is two qubits and they fit the family, caller-supplied seeds, then
 * `restarts` Haar-random points.
 *
 * A max-mode value is the best objective found, i.e. a lower bound on the
 * true supremum; global optimality over the unitary manifold is not certified.
 */

#include "nbl/measurement.hpp"
#include "nbl/random.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace nbl {

enum class Mode { Max, Min };

inline const char* to_string(Mode m) { return m == Mode::Max ? "max" : "min"; }

struct OptimizerConfig {
  int restarts = 64;  ///< Haar-random starts on top of the structured ones
  int refine_iters = 400;
  double step_tolerance = 1e-9;
  double value_tolerance = 1e-10;
  std::uint64_t seed = 0;
  bool structured_seeds = true;
  int threads = 1;

  void validate() const {
    if (restarts < 0 || refine_iters < 1 || threads < 1) {
      throw std::invalid_argument("optimizer counts must be positive");
    }
    if (!(step_tolerance > 0.0) || !(value_tolerance > 0.0)) {
      throw std::invalid_argument("optimizer tolerances must be positive");
    }
  }
};

struct StartRecord {
  std::string label;
  double initial = 0.0;
  double converged = 0.0;
  int sweeps = 0;
};

struct MeasureResult {
  double value = 0.0;
  ProjectiveMeasurement optimal_measurement;
  std::vector<StartRecord> starts;
  Mode mode = Mode::Max;
  std::uint64_t seed = 0;
};

using Objective = std::function<double(const ProjectiveMeasurement&)>;

struct LabeledSeed {
  std::string label;
  ProjectiveMeasurement measurement;
};

namespace detail {

struct StartOutcome {
  StartRecord record;
  BlockUnitaries point;
  double value;
};

// Compass search minimizing `sign * objective` in the chart around `base`.
inline StartOutcome refine(const Objective& objective, const InvariantMeasurementFamily& family, BlockUnitaries base,
                           double sign, const OptimizerConfig& cfg, std::string label) {
  auto eval_at = [&](const BlockUnitaries& w, const std::vector<double>& p) {
    BlockUnitaries u = block_unitaries(family, p);
    for (std::size_t b = 0; b < u.size(); ++b) u[b] = w[b] * u[b];
    return std::make_pair(sign * objective(measurement_from_blocks(family, u)), std::move(u));
  };

  std::vector<double> p(static_cast<std::size_t>(family.parameter_count), 0.0);
  double best = sign * objective(measurement_from_blocks(family, base));
  StartOutcome out{{std::move(label), sign * best, sign * best, 0}, base, sign * best};
  if (family.is_point()) return out;

  double step = 0.25;
  int sweep = 0;
  for (; sweep < cfg.refine_iters && step >= cfg.step_tolerance; ++sweep) {
    const double before = best;
    BlockUnitaries moved;
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (double dir : {1.0, -1.0}) {
        p[i] += dir * step;
        auto [val, u] = eval_at(base, p);
        if (val < best) {
          best = val;
          moved = std::move(u);
          break;
        }
        p[i] -= dir * step;
      }
    }
    if (!moved.empty()) {
      // Re-centre the chart on the accepted point.
      base = std::move(moved);
      std::fill(p.begin(), p.end(), 0.0);
    }
    if (before - best < cfg.value_tolerance) step *= 0.5;
  }
  out.record.converged = sign * best;
  out.record.sweeps = sweep;
  out.point = std::move(base);
  out.value = sign * best;
  return out;
}

}  // namespace detail

/// Structured starts that lie in the family: the eigenbasis always, plus the
/// Bell and Hadamard-product bases on a two-qubit measured space.
inline std::vector<std::pair<std::string, BlockUnitaries>> structured_starts(
    const InvariantMeasurementFamily& family, bool include_two_qubit) {
  std::vector<std::pair<std::string, BlockUnitaries>> out{{"eigen", identity_blocks(family)}};
  if (include_two_qubit && family.target_dims == Dims{2, 2}) {
    for (auto [label, basis] : {std::pair{"bell", bell_basis()}, std::pair{"hadamard", hadamard_product_basis()}}) {
      auto chart = chart_of(family, ProjectiveMeasurement::from_basis(family.target, family.target_dims, basis));
      if (chart) out.emplace_back(label, std::move(*chart));
    }
  }
  return out;
}

/// Best objective over the family. Ties keep the earliest start, so results
/// depend only on (family, objective, config) and not on thread scheduling.
inline MeasureResult optimize(const Objective& objective, const InvariantMeasurementFamily& family, Mode mode,
                              const OptimizerConfig& config, const std::vector<LabeledSeed>& extra_seeds = {}) {
  config.validate();
  const double sign = mode == Mode::Max ? -1.0 : 1.0;

  std::vector<std::pair<std::string, BlockUnitaries>> starts = structured_starts(family, config.structured_seeds);
  if (!family.is_point()) {
    for (const auto& s : extra_seeds) {
      if (auto chart = chart_of(family, s.measurement)) starts.emplace_back(s.label, std::move(*chart));
    }
    for (int r = 0; r < config.restarts; ++r) {
      starts.emplace_back("haar#" + std::to_string(r),
                          haar_blocks(family, mix_seed(config.seed, static_cast<std::uint64_t>(r))));
    }
  }

  std::vector<detail::StartOutcome> outcomes(starts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < starts.size(); i = next++) {
      outcomes[i] = detail::refine(objective, family, starts[i].second, sign, config, starts[i].first);
    }
  };
  const auto nthreads = std::min<std::size_t>(static_cast<std::size_t>(config.threads), starts.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i) {
    if (sign * outcomes[i].value < sign * outcomes[best].value) best = i;
  }
  MeasureResult result;
  result.mode = mode;
  result.seed = config.seed;
  result.optimal_measurement = measurement_from_blocks(family, outcomes[best].point);
  result.value = objective(result.optimal_measurement);
  for (auto& o : outcomes) result.starts.push_back(std::move(o.record));
  return result;
}

}  // namespace nbl
