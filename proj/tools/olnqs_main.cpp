// Copyright 2026 The OLNQS Authors
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

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "olnqs/experiment.hpp"
#include "olnqs/version.hpp"

// Exit codes: 0 success, 2 configuration error, 3 numeric failure.
int main(int argc, char** argv) {
  CLI::App app{"steady states of dissipative spin chains via variational "
               "neural density operators"};
  app.set_version_flag("--version", std::string(olnqs::kVersion));

  std::string config_path;
  std::string mode_override;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool has_seed = false;
  int threads = 1;
  app.add_option("--config", config_path, "experiment configuration file");
  app.add_option("--mode", mode_override,
                 "override the configured mode (rk, rbm, invariant, gradient, natural-gradient)");
  app.add_option("--seed", seed_override, "override the configured seed")
      ->each([&](const std::string&) { has_seed = true; });
  app.add_option("--threads", threads, "worker threads for dense algebra (1 = deterministic)");
  app.add_option("--out", out_override, "override the configured output directory");

  auto* table1 = app.add_subcommand("table1", "print parameter counts and dim[I_G] per chain size");
  int nmax = 8;
  bool table_csv = false;
  table1->add_option("--nmax", nmax, "largest chain size to report")->default_val(8);
  table1->add_flag("--csv", table_csv, "emit CSV instead of an aligned table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Eigen::setNbThreads(threads);

  try {
    if (table1->parsed()) {
      olnqs::cli::table1_report(nmax, std::cout, table_csv);
      return 0;
    }
    if (config_path.empty()) {
      std::cerr << "error: --config is required (or use the table1 subcommand)\n";
      return 2;
    }
    olnqs::cli::ExperimentConfig cfg = olnqs::cli::parse_config(config_path);
    if (!mode_override.empty()) cfg.mode = olnqs::cli::mode_from_string(mode_override);
    if (has_seed) cfg.seed = seed_override;
    if (!out_override.empty()) cfg.out_dir = out_override;
    return olnqs::cli::run_experiment(cfg);
  } catch (const olnqs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const olnqs::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
