// SPDX-License-Identifier: Apache-2.0
//
// oddmcal - online phase-shifter calibration for DDM MIMO radar
// Copyright (C) 2026 The oddmcal authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "oddmcal/commands.hpp"

using namespace oddm;

int main(int argc, char** argv) {
  CLI::App app{"oddmcal: DDM/ODDM MIMO radar simulation and online phase-shifter calibration"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<std::size_t> tx;
  bool print_config = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("-o,--out", out_dir, "override the output directory");
    sub->add_flag("--print-config", print_config, "echo the effective configuration and exit");
  };

  auto* feas = app.add_subcommand("feasibility", "spur-isolation ratios of the configured code");
  add_common(feas);
  feas->add_option("--tx", tx, "Tx of interest (default: calibration.tx_of_interest)");

  std::string criterion = "strict";
  int max_ntx = 6;
  auto* table = app.add_subcommand("table", "minimum PSK order per Tx count");
  table->add_option("criterion", criterion, "strict or gcd")->check(CLI::IsMember({"strict", "gcd"}));
  table->add_option("max_ntx", max_ntx, "largest Tx count")->check(CLI::Range(2, 16));

  auto* spectrum = app.add_subcommand("spectrum", "closed-form and direct DFT spectrum of one Tx code");
  add_common(spectrum);
  spectrum->add_option("--tx", tx, "Tx index (default 0)");

  auto* simulate = app.add_subcommand("simulate", "simulate one frame and export the range-Doppler cube");
  add_common(simulate);

  auto* calibrate = app.add_subcommand("calibrate", "closed-loop calibration of calibration.tx_of_interest");
  add_common(calibrate);
  calibrate->add_option("--tx", tx, "override calibration.tx_of_interest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (table->parsed()) return cmd_table(criterion == "gcd" ? Criterion::Gcd : Criterion::Strict, max_ntx, std::cout);

    RunConfig config = load_config(config_path);
    for (const auto& w : config.warnings) std::cerr << "warning: " << w << "\n";
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (calibrate->parsed() && tx) {
      if (*tx >= config.code.size()) throw ConfigError("requested Tx " + std::to_string(*tx) + " is not configured");
      config.calibration.tx_of_interest = *tx;
    }
    if (print_config) {
      std::cout << dump_config(config);
      return kExitOk;
    }

    if (feas->parsed()) return cmd_feasibility(config, tx, std::cout, std::cerr);
    if (spectrum->parsed()) return cmd_spectrum(config, tx.value_or(0), std::cout);
    if (simulate->parsed()) return cmd_simulate(config, std::cerr);
    if (calibrate->parsed()) return cmd_calibrate(config, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleCode& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
