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

// nbl: measurement-induced nonlocality and nonbilocality from the command line.
//
//   nbl min STATE --measure {hs|gd|affinity}
//   nbl nonbilocal STATE_AB STATE_CD
//   nbl reproduce
//   nbl sweep --check {thm1|thm3|thm4|props} --count N --dims 2x2[,2x3] [--out rows.csv]
//
// STATE is a JSON state file or builtin:<name>. Reports go to stdout as JSON.

#include "nbl/cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

namespace {

using namespace nbl;
using namespace nbl::cli;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("NONBILOCAL_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring non-numeric NONBILOCAL_SEED='" << env << "'\n";
    }
  }
  return 0;
}

void add_optimizer_flags(CLI::App* cmd, OptimizerConfig& cfg) {
  cmd->add_option("--restarts", cfg.restarts, "Haar-random starts")->check(CLI::NonNegativeNumber);
  cmd->add_option("--refine-iters", cfg.refine_iters, "Maximum compass-search sweeps per start")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--step-tol", cfg.step_tolerance, "Stop refining below this step")->check(CLI::PositiveNumber);
  cmd->add_option("--value-tol", cfg.value_tolerance, "Sweep improvement below which the step halves")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cfg.seed, "Random seed (default: $NONBILOCAL_SEED or 0)");
  cmd->add_option("--threads", cfg.threads, "Worker threads for restarts")->check(CLI::PositiveNumber);
  cmd->add_flag("!--no-structured", cfg.structured_seeds, "Skip the eigen/Bell/Hadamard structured starts");
}

int emit(const CommandResult& r) {
  std::cout << r.report.dump(2) << '\n';
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurement-induced nonlocality and affinity-based nonbilocality"};
  app.require_subcommand(1);

  OptimizerConfig cfg;
  cfg.seed = default_seed();

  std::string state_path;
  std::string measure = "affinity";
  auto* min_cmd = app.add_subcommand("min", "Bipartite MIN-type measure of one state");
  min_cmd->add_option("state", state_path, "State file or builtin:<name>")->required();
  min_cmd->add_option("--measure", measure, "hs | gd | affinity")
      ->check(CLI::IsMember({"hs", "gd", "affinity"}));
  add_optimizer_flags(min_cmd, cfg);

  std::string ab_path, cd_path;
  auto* nb_cmd = app.add_subcommand("nonbilocal", "Nonbilocal measure of rho_ab (x) rho_cd with bounds");
  nb_cmd->add_option("state_ab", ab_path, "State file or builtin:<name>")->required();
  nb_cmd->add_option("state_cd", cd_path, "State file or builtin:<name>")->required();
  add_optimizer_flags(nb_cmd, cfg);

  auto* rep_cmd = app.add_subcommand("reproduce", "Run the four worked examples end to end");
  add_optimizer_flags(rep_cmd, cfg);

  int count = 100;
  std::string dims = "2x2";
  std::string check = "thm1";
  std::string out_path;
  auto* sweep_cmd = app.add_subcommand("sweep", "Random-input sweep of one check");
  sweep_cmd->add_option("--count", count, "Number of trials")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--dims", dims, "Input dims, e.g. 2x2 or 2x2,2x3");
  sweep_cmd->add_option("--check", check, "thm1 | thm3 | thm4 | props")
      ->check(CLI::IsMember({"thm1", "thm3", "thm4", "props"}));
  sweep_cmd->add_option("--out", out_path, "Write one CSV row per trial to this path");
  add_optimizer_flags(sweep_cmd, cfg);
  sweep_cmd->footer(
      "CSV columns: trial,input_hash,lhs,rhs,margin,pass\n"
      "  thm1   lhs = N(rho_ba x rho_ab), rhs = affinity MIN, margin = lhs - rhs\n"
      "  thm3   lhs = nonbilocal value, rhs = spectral bound, margin = rhs - lhs\n"
      "  thm4   as thm3 with the marginal-affinity bound (empty when undefined)\n"
      "  props  lhs = value on product inputs, rhs = 0, margin = 1e-8 - lhs\n"
      "Values have 12 significant digits; input_hash is FNV-1a of the input matrices.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*min_cmd) {
      const auto state = materialize(load_state_spec(state_path));
      const std::map<std::string, MinMeasure> kinds{
          {"hs", MinMeasure::HilbertSchmidt}, {"gd", MinMeasure::GeometricDiscord}, {"affinity", MinMeasure::Affinity}};
      return emit(run_min(state, kinds.at(measure), cfg));
    }
    if (*nb_cmd) {
      const auto ab = materialize(load_state_spec(ab_path));
      const auto cd = materialize(load_state_spec(cd_path));
      return emit(run_nonbilocal(ab, cd, cfg));
    }
    if (*rep_cmd) return emit(run_reproduce(cfg));
    if (*sweep_cmd) {
      const std::map<std::string, SweepCheck> kinds{
          {"thm1", SweepCheck::Thm1}, {"thm3", SweepCheck::Thm3}, {"thm4", SweepCheck::Thm4}, {"props", SweepCheck::Props}};
      std::vector<SweepRow> rows;
      const CommandResult r = run_sweep(kinds.at(check), count, dims, cfg.seed, cfg, &rows);
      if (!out_path.empty()) {
        std::ofstream csv(out_path);
        if (!csv) {
          std::cerr << "error: cannot write '" << out_path << "'\n";
          return kInputError;
        }
        write_csv(csv, rows);
      }
      std::cerr << "pass rate: " << r.report["pass_rate"].get<double>() << " (" << r.report["passed_trials"].get<int>()
                << "/" << count << ")\n";
      return emit(r);
    }
  } catch (const DimensionCapError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDimensionCap;
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}
