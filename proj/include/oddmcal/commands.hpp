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

// Subcommands of the oddmcal tool. Each returns a process exit code.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>

#include "oddmcal/config.hpp"

namespace oddm {

enum ExitCode : int { kExitOk = 0, kExitInfeasible = 1, kExitConfig = 2, kExitRuntime = 3 };

/// Per-Tx strict and gcd ratios as text on `text` and JSON on `out`; feasible
/// means the gcd criterion holds for the requested Tx.
int cmd_feasibility(const RunConfig& config, std::optional<std::size_t> tx, std::ostream& out, std::ostream& text);

/// CSV ntx,min_order,example.
int cmd_table(Criterion criterion, int max_ntx, std::ostream& out);

/// CSV bin,closed_abs,closed_phase,dft_abs for one Tx of the configured code.
int cmd_spectrum(const RunConfig& config, std::size_t tx, std::ostream& out);

/// Writes <output>/cube.bin and <output>/cube.json; the operational code is
/// simulated with the configured phase errors (ideal when none are given).
int cmd_simulate(const RunConfig& config, std::ostream& log);

/// Writes <output>/report.json and <output>/convergence.csv.
int cmd_calibrate(const RunConfig& config, std::ostream& log);

std::string report_json(const CalibrationReport& report);
std::string convergence_csv(const CalibrationReport& report);

}  // namespace oddm
