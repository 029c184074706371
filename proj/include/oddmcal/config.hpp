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

// Run configuration: JSON file schema, validation and echo.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oddmcal/calib_loop.hpp"

namespace oddm {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CalibrationSettings {
  std::size_t tx_of_interest = 0;
  int max_frames = 20;
  double threshold_db = 6.0;
  double damping = 1.0;
  int quantization_bits = 0;
  std::optional<BarycenterMode> barycenter;
  bool leakage_compensation = true;
  bool run_all_frames = false;
  int guard_bins = 2;
  double detection_threshold_db = 12.0;
};

struct RunConfig {
  CodeSet code{256, {TxCode(1, 0)}};
  Scene scene;
  Window window = Window::Rect;
  std::vector<PhaseErrorSpec> errors;
  CalibrationSettings calibration;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  /// Non-fatal normalizations applied while parsing.
  std::vector<std::string> warnings;
};

/// Parses and validates a JSON document. Throws ConfigError naming the
/// offending key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON with every default spelled out; parses back to the same run.
std::string dump_config(const RunConfig& config);

CalibrationConfig calibration_config(const RunConfig& config);

}  // namespace oddm
