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

// Closed-loop online calibration of one Tx's phase shifter.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oddmcal/estimator.hpp"

namespace oddm {

/// Hidden phase errors of one Tx: explicit values, or a seeded uniform draw.
struct PhaseErrorSpec {
  std::optional<std::vector<double>> degrees;
  double max_deg = 10.0;
  std::uint64_t seed = 0;

  /// Radians for a constellation of `order` points. Throws if explicit values
  /// have the wrong length.
  RealVector resolve(int order) const;
};

enum class FrameStatus { Updated, Clean, NoTarget, Contaminated, LowSignal };

std::string to_string(FrameStatus s);

struct CalibrationConfig {
  CodeSet operational{256, {TxCode(1, 0)}};
  std::size_t tx_of_interest = 0;
  Scene scene;
  Window window = Window::Rect;
  /// One entry per Tx; missing entries default to +-10 deg draws.
  std::vector<PhaseErrorSpec> errors;
  std::uint64_t seed = 1;
  int max_frames = 20;
  double threshold_db = 6.0;
  double damping = 1.0;
  int quantization_bits = 0;
  /// Empty selects zero for a lone Tx and symmetric otherwise.
  std::optional<BarycenterMode> barycenter;
  bool leakage_compensation = true;
  /// Keep iterating after the spurs have dropped below the threshold.
  bool run_all_frames = false;
  int guard_bins = 2;
  double detection_threshold_db = 12.0;
  /// Called before every frame with the hidden phase errors (radians, per Tx).
  std::function<void(int frame, std::vector<RealVector>& phase_errors)> drift;
};

struct FrameRecord {
  int frame = 0;
  FrameStatus status = FrameStatus::NoTarget;
  /// Spurs of the calibrated Tx above the threshold in this frame.
  bool spurs_detected = false;
  double spur_db = 0.0;
  int detections = 0;
  /// Latest estimate in degrees; frozen when this frame produced none.
  RealVector estimate_deg;
  /// True zero-mean residual phase error during the frame.
  RealVector residual_deg;
  /// Per-Tx peak power above the noise floor, in dB.
  std::vector<double> tx_peak_db;
  std::uint64_t seed = 0;
};

struct CalibrationReport {
  std::size_t tx = 0;
  CodeSet calibration_code{256, {TxCode(1, 0)}};
  BarycenterMode barycenter = BarycenterMode::Mean;
  std::vector<FrameRecord> frames;
  bool converged = false;
  int frames_used = 0;
  RealVector true_errors_deg;
  RealVector final_command_deg;
  RealVector final_residual_deg;
};

/// Max |e_n - mean(e)| in degrees.
double max_abs_deg(const RealVector& residual_deg);

/// Seed of frame f of a run seeded with `seed`.
std::uint64_t frame_seed(std::uint64_t seed, int frame);

CalibrationReport run_calibration(const CalibrationConfig& config);

struct SweepEntry {
  std::size_t tx = 0;
  std::optional<CalibrationReport> report;
  std::string error;
};

/// Independent runs, one per listed Tx, executed concurrently. Infeasible Txs
/// come back with an error and no report.
std::vector<SweepEntry> sweep_tx(const CalibrationConfig& config, const std::vector<std::size_t>& txs);

}  // namespace oddm
