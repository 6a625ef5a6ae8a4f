// Copyright 2026 The roughflow Authors
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
#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "roughflow/cli.hpp"

namespace rc = roughflow::cli;

int main(int argc, char** argv) {
  CLI::App app{"roughflow: rough-density incompressible Navier-Stokes experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", roughflow::kVersion);

  rc::RunManifest m;
  m.threads = rc::threads_from_environment();
  std::string k_list;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", m.output_dir, "Output directory")->required();
    sub->add_option("--seed", m.seed, "Random seed");
  };

  auto* simulate = app.add_subcommand("simulate", "Run the solver and write diagnostics");
  simulate->add_option("--config", m.config_path, "Config file")->required();
  common(simulate);

  auto* classify = app.add_subcommand("classify", "Lp curve and function-class verdicts of a density");
  classify->add_option("--profile", m.profile, "neg_log, log_abs_log, log_log_abs_log or grid:FILE")->required();
  classify->add_option("--dim", m.dim, "Dimension of the radial profile");
  common(classify);

  auto* inequalities = app.add_subcommand("verify-inequalities", "Random sweeps of the functional inequalities");
  inequalities->add_option("--sweep", m.sweep, "Samples per inequality");
  inequalities->add_option("--grid", m.grid, "Grid size");
  common(inequalities);

  auto* criterion = app.add_subcommand("criterion", "Evaluate the global or local existence criterion");
  criterion->add_option("--config", m.config_path, "Config file")->required();
  criterion->add_option("--mode", m.mode, "vacuum, vacuum-free or local")
      ->check(CLI::IsMember({"vacuum", "vacuum-free", "local"}));
  common(criterion);

  auto* truncation = app.add_subcommand("truncation-study", "Solve with truncated densities min(rho0, k)");
  truncation->add_option("--config", m.config_path, "Config file")->required();
  truncation->add_option("--k-list", k_list, "Comma-separated truncation levels")->required();
  common(truncation);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rc::kExitInvalid;
  }

  if (simulate->parsed()) m.command = rc::Command::simulate;
  if (classify->parsed()) m.command = rc::Command::classify;
  if (inequalities->parsed()) m.command = rc::Command::verify_inequalities;
  if (criterion->parsed()) m.command = rc::Command::criterion;
  if (truncation->parsed()) {
    m.command = rc::Command::truncation_study;
    try {
      m.k_list = roughflow::Config::parse_list("--k-list", k_list);
    } catch (const std::exception& e) {
      std::cerr << "roughflow truncation-study: " << e.what() << "\n";
      return rc::kExitInvalid;
    }
  }
  return rc::execute(m, std::cerr);
}
