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

#include "oddmcal/ps_model.hpp"

#include <random>
#include <stdexcept>

namespace oddm {

ErroneousConstellation::ErroneousConstellation(const TxCode& tx, const RealVector& phase_errors,
                                               const std::optional<RealVector>& amplitude_errors)
    : code_(tx), ideal_(ideal_constellation(tx)) {
  const auto n = ideal_.size();
  if (phase_errors.size() != n) throw std::invalid_argument("phase error vector length must equal the PSK order");
  if (amplitude_errors && amplitude_errors->size() != n)
    throw std::invalid_argument("amplitude error vector length must equal the PSK order");

  phase_errors_ = phase_errors.array() - phase_errors.mean();
  errors_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double amp = amplitude_errors ? 1.0 + (*amplitude_errors)(i) : 1.0;
    errors_(i) = std::polar(amp, phase_errors_(i));
  }
}

ComplexVector ErroneousConstellation::commanded_points(const RealVector& offsets) const {
  if (offsets.size() != ideal_.size()) throw std::invalid_argument("command length must equal the PSK order");
  ComplexVector out = actual_points();
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) *= std::polar(1.0, offsets(i));
  return out;
}

RealVector sample_phase_errors(int order, double max_abs_deg, std::uint64_t seed) {
  if (order < 1) throw std::invalid_argument("PSK order must be positive");
  if (max_abs_deg < 0) throw std::invalid_argument("max_abs_deg must be non-negative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-max_abs_deg, max_abs_deg);
  RealVector out(order);
  for (int i = 0; i < order; ++i) out(i) = deg2rad(dist(rng));
  out.array() -= out.mean();
  return out;
}

ErroneousConstellation make_erroneous_constellation(const TxCode& tx, const RealVector& phase_errors,
                                                    const std::optional<RealVector>& amplitude_errors) {
  return ErroneousConstellation(tx, phase_errors, amplitude_errors);
}

double quantization_step(int bits) {
  if (bits < 0) throw std::invalid_argument("quantization bits must be non-negative");
  return bits == 0 ? 0.0 : 2.0 * kPi / double(std::uint64_t(1) << bits);
}

double quantize_phase(double rad, double step) {
  if (step <= 0.0) return wrap_phase(rad);
  return wrap_phase(step * std::round(rad / step));
}

PsCommand apply_predistortion(const PsCommand& cmd, const ComplexVector& est_errors, double damping) {
  if (est_errors.size() != cmd.offsets.size())
    throw std::invalid_argument("estimate length must equal the command length");
  PsCommand out = cmd;
  for (Eigen::Index i = 0; i < out.offsets.size(); ++i)
    out.offsets(i) = quantize_phase(wrap_phase(cmd.offsets(i) - damping * std::arg(est_errors(i))), cmd.quantization);
  return out;
}

}  // namespace oddm
