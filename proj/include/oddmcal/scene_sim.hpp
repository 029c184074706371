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

// Point-target slow-time synthesis under a DDM code set and the Doppler FFT
// producing the modulated range-Doppler cube.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oddmcal/codes.hpp"
#include "oddmcal/ps_model.hpp"

namespace oddm {

using CubeMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Target {
  int range_bin = 0;
  double doppler_bin = 0.0;  // unmodulated (true) Doppler, bins
  double amplitude = 1.0;
  double initial_phase = 0.0;  // radians
  std::optional<double> angle_deg;
};

/// Element positions in half-wavelength units.
struct ArrayGeometry {
  std::vector<double> tx_positions;
  std::vector<double> rx_positions;
};

struct Scene {
  std::vector<Target> targets;
  int range_bins = 16;
  int rx_count = 4;
  /// Post-FFT per-bin SNR of the weakest Tx peak of the strongest target; empty = noiseless.
  std::optional<double> snr_db;
  std::optional<ArrayGeometry> array;
};

enum class Window { Rect, Hann };

std::string to_string(Window w);
Window window_from_string(const std::string& s);

/// Complex samples indexed [range][slow-time or Doppler][rx]. Row (r * rx + q)
/// of `data` is the slow-time / Doppler line of range bin r at receiver q.
struct Cube3 {
  int range_bins = 0;
  int columns = 0;
  int rx_count = 0;
  CubeMatrix data;

  Cube3() = default;
  Cube3(int range_bins, int columns, int rx_count);

  Complex& operator()(int r, int col, int q) { return data(Eigen::Index(r) * rx_count + q, col); }
  Complex operator()(int r, int col, int q) const { return data(Eigen::Index(r) * rx_count + q, col); }
  auto line(int r, int q) { return data.row(Eigen::Index(r) * rx_count + q); }
  auto line(int r, int q) const { return data.row(Eigen::Index(r) * rx_count + q); }
  double energy() const { return data.squaredNorm(); }
};

using SlowTime = Cube3;

/// Range-Doppler cube after the Doppler FFT, with the code set that produced it.
class RadarCube {
 public:
  RadarCube(Cube3 samples, CodeSet codes, Window window);

  int range_bins() const { return samples_.range_bins; }
  int doppler_bins() const { return samples_.columns; }
  int rx_count() const { return samples_.rx_count; }
  const CodeSet& codes() const { return codes_; }
  Window window() const { return window_; }

  Complex operator()(int r, int mu, int q) const { return samples_(r, mu, q); }
  auto doppler_cut(int r, int q) const { return samples_.line(r, q); }
  const Cube3& samples() const { return samples_; }

 private:
  Cube3 samples_;
  CodeSet codes_;
  Window window_;
};

/// Steering phase factor of Tx k at Rx q for a target; 1 without an array or angle.
Complex steering(const Scene& scene, std::size_t tx, int rx, const Target& target);

/// Complex noise variance per Doppler bin implied by the scene's SNR (0 when noiseless).
double post_fft_noise_power(const Scene& scene, const CodeSet& codes);

/// Sums amplitude * steering * Doppler tone * c_k[m mod L_k] over targets and Txs,
/// then adds white Gaussian noise. `constellations` holds the transmitted points per Tx
/// (length L_k each; zeros switch a Tx off).
SlowTime synth_slow_time(const Scene& scene, const CodeSet& codes, const std::vector<ComplexVector>& constellations,
                         std::uint64_t seed);

/// M-point DFT along the ramp axis for every (range, rx) line.
RadarCube doppler_process(const SlowTime& slow_time, const CodeSet& codes, Window window = Window::Rect);

RadarCube simulate_frame(const Scene& scene, const CodeSet& codes, const std::vector<ComplexVector>& constellations,
                         std::uint64_t seed, Window window = Window::Rect);

RadarCube simulate_frame(const Scene& scene, const CodeSet& codes,
                         const std::vector<ErroneousConstellation>& constellations, std::uint64_t seed,
                         Window window = Window::Rect);

/// Writes `<stem>.bin` (little-endian complex64, row-major [range][doppler][rx]) and
/// `<stem>.json` (dimensions, code set, seed, window). Both files are written atomically.
void export_cube(const RadarCube& cube, const std::filesystem::path& stem, std::uint64_t seed);

/// Reads back a cube written by export_cube (values rounded to complex64).
RadarCube import_cube(const std::filesystem::path& stem);

}  // namespace oddm
