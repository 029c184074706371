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

// Super-constellation phase-error estimation from a PSG vector.
//
// The L-point IDFT of a Tx's PSG vector yields alpha * c~[n] + b: the erroneous
// constellation scaled by the target's complex amplitude (times M/L) and
// offset by whatever the other Txs put on the PSG bins. Removing b and alpha
// and de-rotating by the ideal points gives the per-point complex errors.

#pragma once

#include <span>

#include "oddmcal/psg_extract.hpp"

namespace oddm {

/// How the common offset b of the super-constellation is obtained.
enum class BarycenterMode {
  /// b = 0: no other Tx shares the PSG (single-Tx frames).
  Zero,
  /// b = mean of the points. Discards the g = 0 bin entirely; biased to first
  /// order in the phase errors, which the closed loop removes geometrically.
  Mean,
  /// Removes from the g = 0 bin only what the other Txs put there, predicting
  /// the Tx's own g = 0 spur from the g = 2 spur (real phase errors have a
  /// conjugate-symmetric spectrum). Needs L >= 3; bias is second order.
  Symmetric,
};

std::string to_string(BarycenterMode mode);
BarycenterMode barycenter_mode_from_string(const std::string& s);

struct ErrorEstimate {
  ComplexVector errors;  // eps_hat, zero-mean phase
  RealVector phase_deg;
  double quality = 0.0;  // |alpha_hat|
};

struct EstimatorOptions {
  BarycenterMode barycenter = BarycenterMode::Mean;
  /// estimates with |alpha_hat| at or below this are rejected as LowSignal
  double alpha_floor = 0.0;
};

/// Inverse L-point DFT of the PSG values (1/L scaling), reordered to
/// constellation index order so that a noiseless single-Tx vector gives
/// points[n] = a (M/L) c~[n] for any factor p.
ComplexVector super_constellation(const PsgVector& v);

/// Arithmetic mean of the points. Requires at least two points.
Complex estimate_barycenter(const ComplexVector& points);

/// Barycenter from the PSG vector with the Tx's own g = 0 spur predicted
/// from its g = 2 spur. Requires a reduced order of at least 3.
Complex estimate_barycenter_symmetric(const PsgVector& v);

/// Least-squares scale: (1/L) sum (points[n] - b) conj(c[n]).
Complex estimate_alpha(const ComplexVector& points, Complex barycenter, const ComplexVector& ideal);

/// Full estimate: eps_hat = conj(c) .* (points - b) / alpha_hat, then fixed to
/// zero mean phase and unit geometric-mean magnitude (the common factor is the
/// channel, not the phase shifter). Throws LowSignal.
ErrorEstimate estimate_phase_errors(const PsgVector& v, const EstimatorOptions& options = {});

/// Quality-weighted complex average, re-centered to zero mean phase.
ErrorEstimate aggregate_estimates(std::span<const ErrorEstimate> estimates);

}  // namespace oddm
