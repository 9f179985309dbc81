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
 * @file commands.hpp
 * @brief The work behind each `nbl` subcommand, returning a JSON report and
 * an exit status so the same code paths can be driven from tests.
 *
 * Exit codes: 0 success, 1 assertion failure, 2 input error, 3 dimension cap.
 * Reported values are rounded to 12 significant digits.
 */

#include "nbl/cli/state_spec.hpp"
#include "nbl/measures.hpp"
#include "nbl/nonbilocal.hpp"
#include "nbl/random.hpp"

#include <json.hpp>

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nbl::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kAssertionFailed = 1, kInputError = 2, kDimensionCap = 3 };

struct CommandResult {
  Json report;
  int exit_code = kOk;
};

/// Rounds to 12 significant digits so reports compare textually.
inline double sig12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline std::string format12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline Json config_json(const OptimizerConfig& c) {
  return Json{{"restarts", c.restarts},
              {"refine_iters", c.refine_iters},
              {"step_tolerance", c.step_tolerance},
              {"value_tolerance", c.value_tolerance},
              {"seed", c.seed},
              {"structured_seeds", c.structured_seeds},
              {"threads", c.threads}};
}

/// Row-major list of (re, im) pairs.
inline Json matrix_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back({sig12(m(r, c).real()), sig12(m(r, c).imag())});
  }
  return out;
}

inline Json measurement_json(const ProjectiveMeasurement& m) {
  Json projectors = Json::array();
  for (const auto& p : m.projectors) projectors.push_back(matrix_json(p));
  return Json{{"target", m.target}, {"target_dims", m.target_dims}, {"projectors", projectors}};
}

inline Json result_json(const MeasureResult& r) {
  Json starts = Json::array();
  for (const auto& s : r.starts) {
    starts.push_back(Json{{"label", s.label},
                          {"initial", sig12(s.initial)},
                          {"converged", sig12(s.converged)},
                          {"sweeps", s.sweeps}});
  }
  return Json{{"value", sig12(r.value)},
              {"mode", to_string(r.mode)},
              {"seed", r.seed},
              {"optimal_measurement", measurement_json(r.optimal_measurement)},
              {"starts", starts}};
}

inline Json state_json(const LoadedState& s) {
  return Json{{"label", s.label}, {"dims", s.rho.dims()}, {"pure", s.ket.has_value()}, {"matrix", matrix_json(s.rho.matrix())}};
}

struct Assertion {
  std::string label;
  std::string relation;  ///< "==" within tolerance, ">=" / "<=" with slack
  double expected = 0.0;
  double observed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline Assertion assert_near(std::string label, double expected, double observed, double tolerance) {
  return {std::move(label), "==", expected, observed, tolerance, std::abs(observed - expected) <= tolerance};
}

inline Assertion assert_at_least(std::string label, double bound, double observed, double slack) {
  return {std::move(label), ">=", bound, observed, slack, observed >= bound - slack};
}

inline Assertion assert_at_most(std::string label, double bound, double observed, double slack) {
  return {std::move(label), "<=", bound, observed, slack, observed <= bound + slack};
}

inline Json assertion_json(const Assertion& a) {
  return Json{{"label", a.label},           {"relation", a.relation},   {"expected", sig12(a.expected)},
              {"observed", sig12(a.observed)}, {"tolerance", a.tolerance}, {"pass", a.pass}};
}

namespace detail {

class Stopwatch {
 public:
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline double start_value(const MeasureResult& r, const std::string& label) {
  for (const auto& s : r.starts) {
    if (s.label == label) return s.initial;
  }
  throw std::logic_error("no start labelled '" + label + "'");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// min

enum class MinMeasure { HilbertSchmidt, GeometricDiscord, Affinity };

inline const char* to_string(MinMeasure m) {
  switch (m) {
    case MinMeasure::HilbertSchmidt: return "hs";
    case MinMeasure::GeometricDiscord: return "gd";
    case MinMeasure::Affinity: return "affinity";
  }
  return "?";
}

inline CommandResult run_min(const LoadedState& state, MinMeasure measure, const OptimizerConfig& config) {
  detail::Stopwatch clock;
  MeasureResult r;
  switch (measure) {
    case MinMeasure::HilbertSchmidt: r = hs_min(state.rho, config); break;
    case MinMeasure::GeometricDiscord: r = geometric_discord(state.rho, config); break;
    case MinMeasure::Affinity: r = affinity_min(state.rho, config); break;
  }
  CommandResult out;
  out.report = Json{{"command", "min"},
                    {"measure", to_string(measure)},
                    {"config", config_json(config)},
                    {"input", state_json(state)},
                    {"result", result_json(r)},
                    {"wall_time_s", clock.seconds()}};
  return out;
}

// ---------------------------------------------------------------------------
// nonbilocal

inline Json thm5_json(const Thm5Result& t) {
  return Json{{"closed_value", sig12(t.closed_value)},
              {"direct_min_value", sig12(t.direct_min_value)},
              {"affinity_b", sig12(t.affinity_b)},
              {"printed_term", sig12(t.printed_term)},
              {"direct_term", sig12(t.direct_term)},
              {"discrepancy", t.discrepancy}};
}

inline CommandResult run_nonbilocal(const LoadedState& ab, const LoadedState& cd, const OptimizerConfig& config) {
  detail::Stopwatch clock;
  const BilocalInput in(ab.rho, cd.rho);
  const MeasureResult r = nonbilocal(in, config);
  const BoundReport bounds = bound_report(in, r.value, config);

  Json bj{{"thm3_upper", sig12(bounds.thm3_upper)},
          {"thm4_upper", bounds.thm4_upper ? Json(sig12(*bounds.thm4_upper)) : Json(nullptr)},
          {"thm5", bounds.thm5 ? thm5_json(*bounds.thm5) : Json(nullptr)},
          {"ordering_ok", bounds.ordering_ok}};
  std::vector<Assertion> checks{
      assert_at_most("value <= thm3 upper bound", bounds.thm3_upper, r.value, kBoundSlack)};
  if (bounds.thm4_upper) {
    checks.push_back(assert_at_most("value <= thm4 upper bound", *bounds.thm4_upper, r.value, kBoundSlack));
  }
  Json thm2 = nullptr;
  if (ab.ket && cd.ket) {
    const double closed = nonbilocal_pure(*ab.ket, *cd.ket);
    thm2 = sig12(closed);
    checks.push_back(assert_near("pure closed form matches optimizer", closed, r.value, 1e-5));
  }
  Json aj = Json::array();
  bool pass = true;
  for (const auto& a : checks) {
    aj.push_back(assertion_json(a));
    pass = pass && a.pass;
  }
  CommandResult out;
  out.report = Json{{"command", "nonbilocal"},
                    {"config", config_json(config)},
                    {"input_ab", state_json(ab)},
                    {"input_cd", state_json(cd)},
                    {"result", result_json(r)},
                    {"thm2_value", thm2},
                    {"bounds", bj},
                    {"assertions", aj},
                    {"passed", pass},
                    {"wall_time_s", clock.seconds()}};
  out.exit_code = pass ? kOk : kAssertionFailed;
  return out;
}

// ---------------------------------------------------------------------------
// reproduce

struct ExampleOutcome {
  std::string name;
  Json values;
  std::vector<Assertion> assertions;

  [[nodiscard]] bool pass() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
  }
};

inline std::vector<ExampleOutcome> reproduce_examples(const OptimizerConfig& config) {
  const auto ket00 = builtin_state("ket00");
  const auto phi = builtin_state("bell_phi_plus");
  const auto mix3 = builtin_state("example3_mix");
  const auto cls4 = builtin_state("example4_classical");
  std::vector<ExampleOutcome> out;

  {
    ExampleOutcome e{"example1", Json::object(), {}};
    const double closed = nonbilocal_pure(*ket00.ket, *phi.ket);
    const double numeric = nonbilocal(BilocalInput(ket00.rho, phi.rho), config).value;
    e.values = Json{{"thm2", sig12(closed)}, {"numeric", sig12(numeric)}};
    e.assertions.push_back(assert_near("thm2 closed form = 0.5", 0.5, closed, 1e-6));
    e.assertions.push_back(assert_near("numeric nonbilocal = 0.5", 0.5, numeric, 1e-6));
    out.push_back(std::move(e));
  }
  {
    ExampleOutcome e{"example2", Json::object(), {}};
    const double closed = nonbilocal_pure(*phi.ket, *phi.ket);
    const double numeric = nonbilocal(BilocalInput(phi.rho, phi.rho), config).value;
    e.values = Json{{"thm2", sig12(closed)}, {"numeric", sig12(numeric)}};
    e.assertions.push_back(assert_near("thm2 closed form = 0.75", 0.75, closed, 1e-6));
    e.assertions.push_back(assert_near("numeric nonbilocal = 0.75", 0.75, numeric, 1e-6));
    out.push_back(std::move(e));
  }
  {
    ExampleOutcome e{"example3", Json::object(), {}};
    const Thm1Check t = verify_thm1(mix3.rho, config);
    e.values = Json{{"affinity_min", sig12(t.rhs)},
                    {"nonbilocal_self_pair", sig12(t.lhs)},
                    {"thm3_upper", sig12(bound_thm3(BilocalInput(swap_factors(mix3.rho), mix3.rho)))}};
    e.assertions.push_back(assert_near("affinity_min = 1/6", 1.0 / 6.0, t.rhs, 1e-6));
    e.assertions.push_back(assert_at_least("nonbilocal(rho_ba x rho_ab) >= 5/12", 5.0 / 12.0, t.lhs, 1e-6));
    if (config.structured_seeds) {
      const double bell = detail::start_value(t.nonbilocal_result, "bell");
      e.values["bell_seed"] = sig12(bell);
      e.assertions.push_back(assert_near("Bell-basis seed = 5/12", 5.0 / 12.0, bell, 1e-9));
    }
    out.push_back(std::move(e));
  }
  {
    ExampleOutcome e{"example4", Json::object(), {}};
    const BilocalInput in(cls4.rho, cls4.rho);
    const MeasureResult r = nonbilocal(in, config);
    e.values = Json{{"numeric", sig12(r.value)},
                    {"eigen_seed", sig12(detail::start_value(r, "eigen"))},
                    {"affinity_min_input", sig12(affinity_min(cls4.rho, config).value)},
                    {"thm3_upper", sig12(bound_thm3(in))}};
    e.assertions.push_back(assert_at_least("numeric nonbilocal >= 3/4", 0.75, r.value, 1e-6));
    if (config.structured_seeds) {
      const double had = detail::start_value(r, "hadamard");
      e.values["hadamard_seed"] = sig12(had);
      e.assertions.push_back(assert_near("Hadamard-product seed = 3/4", 0.75, had, 1e-9));
    }
    out.push_back(std::move(e));
  }
  return out;
}

inline CommandResult run_reproduce(const OptimizerConfig& config) {
  detail::Stopwatch clock;
  const auto examples = reproduce_examples(config);
  Json ej = Json::array();
  bool pass = true;
  for (const auto& e : examples) {
    Json aj = Json::array();
    for (const auto& a : e.assertions) aj.push_back(assertion_json(a));
    ej.push_back(Json{{"name", e.name}, {"values", e.values}, {"assertions", aj}, {"pass", e.pass()}});
    pass = pass && e.pass();
  }
  CommandResult out;
  out.report = Json{{"command", "reproduce"},
                    {"config", config_json(config)},
                    {"examples", ej},
                    {"passed", pass},
                    {"wall_time_s", clock.seconds()}};
  out.exit_code = pass ? kOk : kAssertionFailed;
  return out;
}

// ---------------------------------------------------------------------------
// sweep

enum class SweepCheck { Thm1, Thm3, Thm4, Props };

inline const char* to_string(SweepCheck c) {
  switch (c) {
    case SweepCheck::Thm1: return "thm1";
    case SweepCheck::Thm3: return "thm3";
    case SweepCheck::Thm4: return "thm4";
    case SweepCheck::Props: return "props";
  }
  return "?";
}

/// CSV columns, in order.
inline constexpr const char* kSweepCsvHeader = "trial,input_hash,lhs,rhs,margin,pass";

struct SweepRow {
  int trial = 0;
  std::string input_hash;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  ///< >= -tolerance means pass
  bool pass = false;
};

/// "2x2" (both inputs) or "2x2,2x3" (rho_ab, rho_cd).
inline std::pair<Dims, Dims> parse_sweep_dims(const std::string& text) {
  auto parse_one = [&](const std::string& s) {
    Dims d;
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const std::size_t x = s.find('x', pos);
      const std::string tok = s.substr(pos, x == std::string::npos ? std::string::npos : x - pos);
      if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
        throw SpecError("--dims: expected e.g. 2x2 or 2x2,2x3, got '" + text + "'");
      }
      d.push_back(std::stoi(tok));
      if (x == std::string::npos) break;
      pos = x + 1;
    }
    if (d.size() != 2 || d[0] < 2 || d[1] < 2) throw SpecError("--dims: each input needs two factors of size >= 2");
    return d;
  };
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos) {
    const Dims d = parse_one(text);
    return {d, d};
  }
  return {parse_one(text.substr(0, comma)), parse_one(text.substr(comma + 1))};
}

/// FNV-1a over the raw bytes of the input matrices.
inline std::string input_hash(std::initializer_list<const Matrix*> ms) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Matrix* m : ms) {
    const auto* p = reinterpret_cast<const unsigned char*>(m->data());
    for (std::size_t k = 0; k < static_cast<std::size_t>(m->size()) * sizeof(Complex); ++k) {
      h ^= p[k];
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

inline SweepRow sweep_trial(SweepCheck check, int trial, const std::pair<Dims, Dims>& dims, std::uint64_t seed,
                            const OptimizerConfig& config) {
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
  SweepRow row;
  row.trial = trial;
  const int dab = dims.first[0] * dims.first[1];
  const int dcd = dims.second[0] * dims.second[1];
  switch (check) {
    case SweepCheck::Thm1: {
      const DensityOperator rho = random_state(dims.first, 1 + trial % dab, rng);
      const Thm1Check t = verify_thm1(rho, config);
      row = {trial, input_hash({&rho.matrix()}), t.lhs, t.rhs, t.lhs - t.rhs, t.holds};
      break;
    }
    case SweepCheck::Thm3:
    case SweepCheck::Thm4: {
      const DensityOperator ab = random_state(dims.first, dab, rng);
      const DensityOperator cd = random_state(dims.second, dcd, rng);
      const BilocalInput in(ab, cd);
      const double value = nonbilocal(in, config).value;
      std::optional<double> bound = check == SweepCheck::Thm3 ? std::optional<double>(bound_thm3(in)) : bound_thm4(in);
      row.trial = trial;
      row.input_hash = input_hash({&ab.matrix(), &cd.matrix()});
      row.lhs = value;
      row.rhs = bound.value_or(std::nan(""));
      row.margin = bound ? *bound - value : std::nan("");
      // An undefined Theorem 4 bound (degenerate rho_b) is not a failure.
      row.pass = !bound || row.margin >= -kBoundSlack;
      break;
    }
    case SweepCheck::Props: {
      const DensityOperator a = random_state(Dims{dims.first[0]}, dims.first[0], rng);
      const DensityOperator b = random_state(Dims{dims.first[1]}, dims.first[1], rng);
      const DensityOperator c = random_state(Dims{dims.second[0]}, dims.second[0], rng);
      const DensityOperator d = random_state(Dims{dims.second[1]}, dims.second[1], rng);
      const BilocalInput in(tensor(a, b), tensor(c, d));
      const double value = nonbilocal(in, config).value;
      row = {trial, input_hash({&in.rho_ab.matrix(), &in.rho_cd.matrix()}), value, 0.0, 1e-8 - value,
             value >= 0.0 && value < 1e-8};
      break;
    }
  }
  return row;
}

inline std::vector<SweepRow> run_sweep_rows(SweepCheck check, int count, const std::pair<Dims, Dims>& dims,
                                            std::uint64_t seed, const OptimizerConfig& config) {
  if (count < 1) throw SpecError("--count must be at least 1");
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) rows.push_back(sweep_trial(check, t, dims, seed, config));
  return rows;
}

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.trial << ',' << r.input_hash << ',' << format12(r.lhs) << ',' << format12(r.rhs) << ','
       << format12(r.margin) << ',' << (r.pass ? "true" : "false") << '\n';
  }
}

inline CommandResult run_sweep(SweepCheck check, int count, const std::string& dims_text, std::uint64_t seed,
                               const OptimizerConfig& config, std::vector<SweepRow>* rows_out = nullptr) {
  detail::Stopwatch clock;
  const auto dims = parse_sweep_dims(dims_text);
  auto rows = run_sweep_rows(check, count, dims, seed, config);
  int passed = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    passed += r.pass ? 1 : 0;
    if (!std::isnan(r.margin)) worst = std::min(worst, r.margin);
  }
  const double rate = static_cast<double>(passed) / static_cast<double>(rows.size());
  CommandResult out;
  out.report = Json{{"command", "sweep"},
                    {"check", to_string(check)},
                    {"count", count},
                    {"dims", dims_text},
                    {"seed", seed},
                    {"config", config_json(config)},
                    {"passed_trials", passed},
                    {"pass_rate", sig12(rate)},
                    {"worst_margin", std::isfinite(worst) ? Json(sig12(worst)) : Json(nullptr)},
                    {"passed", passed == count},
                    {"wall_time_s", clock.seconds()}};
  out.exit_code = passed == count ? kOk : kAssertionFailed;
  if (rows_out) *rows_out = std::move(rows);
  return out;
}

/// Strips the fields that legitimately differ between identical runs.
inline Json without_wall_time(Json j) {
  if (j.is_object()) {
    j.erase("wall_time_s");
    for (auto& [k, v] : j.items()) v = without_wall_time(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = without_wall_time(v);
  }
  return j;
}

}  // namespace nbl::cli
