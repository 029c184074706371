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

// Peak-and-spur groups (PSG): where one Tx's target peak and its
// error-induced spurs land on the Doppler axis, and how to read them out.
//
// Convention: g = 0 is the target's unmodulated Doppler bin mu_t and the Tx's
// own peak sits at g = 1 (mu_t + D_k). The PSG of a Tx therefore spans the
// lines mu_t + g p M / L, g = 0..L'-1.

#pragma once

#include <span>
#include <vector>

#include "oddmcal/scene_sim.hpp"

namespace oddm {

struct Detection {
  int index = 0;
  int range_bin = 0;
  int doppler_bin = 0;  // mu_t, the g = 0 PSG member
  int peak_bin = 0;     // bin that triggered the detection
  double peak_magnitude = 0.0;
};

struct PsgVector {
  std::size_t tx = 0;
  int target = 0;
  int rx = 0;
  TxCode code{1, 0};  // reduced code of the Tx
  int ramps = 0;
  ComplexVector values;  // ordered by g
};

/// Exact PSG positions (mu_t + g p/L M) mod M for g = 0..L'-1 of the reduced code.
std::vector<Rational> psg_indices(int mu_t, const TxCode& tx, int ramps);

/// Integer PSG bins; throws NonIntegerSpurPosition if any position is fractional.
std::vector<int> psg_bins(int mu_t, const TxCode& tx, int ramps);

/// Index of the Tx's own peak inside its PSG (1, or 0 for an unmodulated Tx).
inline int psg_peak_index(const TxCode& tx) { return 1 % tx.reduced().order(); }

/// values[g] = cube[r_t][position[g]][q].
PsgVector extract_psg_vector(const RadarCube& cube, const Detection& det, std::size_t tx, int rx);

/// Like extract_psg_vector, but first removes the contribution of every
/// fractional (ODDM) line of the other Txs, and of any other target in
/// `detections` sharing the range bin. The line amplitudes are fitted by least
/// squares over the Doppler bins that no integer line occupies; rect window only.
PsgVector extract_psg_vector_compensated(const RadarCube& cube, const Detection& det, std::size_t tx, int rx,
                                         std::span<const Detection> detections);

/// Cell-averaging detector over the Doppler axis of the Rx-integrated power map.
/// Each detection claims every PSG bin (all Txs) of its target so spurs are not
/// re-reported; mu_t is the hypothesis whose predicted Tx peaks carry most energy.
std::vector<Detection> detect_targets(const RadarCube& cube, int guard_bins = 2, double threshold_db = 12.0,
                                      int training_bins = 16);

/// Median-based estimate of the complex noise power per cell.
double estimate_noise_power(const RadarCube& cube);

/// True when another detection at the same range puts a line on one of the Tx's PSG bins.
bool psg_contaminated(const RadarCube& cube, const Detection& det, std::size_t tx,
                      std::span<const Detection> detections);

/// Spur bins of a Tx's PSG: every g except its own peak and the members that
/// another Tx's lines overlap.
std::vector<int> spur_members(const CodeSet& codes, std::size_t tx);

/// Largest Rx-averaged power over the spur members, in dB above the noise
/// power. -inf when the spurs are numerically zero, +inf for a noiseless cube
/// with nonzero spurs. Uses leakage-compensated PSG vectors when `detections`
/// is non-empty.
double residual_spur_power(const RadarCube& cube, const Detection& det, std::size_t tx,
                           std::span<const Detection> detections = {}, double noise_power = -1.0);

/// Factor that, applied to a cube sample at bin mu, removes the linear and
/// starting phase terms of the Tx's Dirichlet spectrum and normalizes its
/// magnitude to the mainlobe value. Throws DirichletNull on a spectral null.
Complex oddm_compensation(int mu, const TxCode& tx, int ramps);

}  // namespace oddm
