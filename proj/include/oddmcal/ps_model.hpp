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

// Phase-shifter model: erroneous constellations and the predistortion state
// that the closed loop writes back to the phase shifters.

#pragma once

#include <cstdint>
#include <optional>

#include "oddmcal/codes.hpp"

namespace oddm {

/// Ideal PSK points multiplied by per-point complex errors.
/// The phase part of the errors always has zero mean; a common phase would be a
/// channel imbalance, not a phase-shifter error.
class ErroneousConstellation {
 public:
  ErroneousConstellation(const TxCode& tx, const RealVector& phase_errors,
                         const std::optional<RealVector>& amplitude_errors = std::nullopt);

  int order() const { return static_cast<int>(ideal_.size()); }
  const TxCode& code() const { return code_; }
  const ComplexVector& ideal_points() const { return ideal_; }
  /// Complex errors eps[n] = exp(j delta_n) (1 + a_n).
  const ComplexVector& errors() const { return errors_; }
  const RealVector& phase_errors() const { return phase_errors_; }
  ComplexVector actual_points() const { return ideal_.cwiseProduct(errors_); }

  /// Actual points with commanded phase offsets applied on top of the errors.
  ComplexVector commanded_points(const RealVector& offsets) const;

 private:
  TxCode code_;
  ComplexVector ideal_;
  ComplexVector errors_;
  RealVector phase_errors_;
};

/// Uniform phase errors in [-max_abs_deg, max_abs_deg], mean removed. Radians.
RealVector sample_phase_errors(int order, double max_abs_deg, std::uint64_t seed);

ErroneousConstellation make_erroneous_constellation(const TxCode& tx, const RealVector& phase_errors,
                                                    const std::optional<RealVector>& amplitude_errors = std::nullopt);

/// Commanded per-point phase offsets (the predistortion state).
struct PsCommand {
  RealVector offsets;         // radians, in (-pi, pi]
  double quantization = 0.0;  // radians; 0 means continuous

  static PsCommand zeros(int order, double quantization = 0.0) {
    return {RealVector::Zero(order), quantization};
  }
};

/// Phase-shifter resolution for a given bit count (2*pi / 2^bits); 0 bits is continuous.
double quantization_step(int bits);

/// Rounds to the quantization grid and wraps into (-pi, pi].
double quantize_phase(double rad, double step);

/// offset[n] <- Q(wrap(offset[n] - damping * arg(est_errors[n]))).
PsCommand apply_predistortion(const PsCommand& cmd, const ComplexVector& est_errors, double damping = 1.0);

}  // namespace oddm
