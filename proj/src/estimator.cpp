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

#include "oddmcal/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "oddmcal/dsp.hpp"

namespace oddm {

std::string to_string(BarycenterMode mode) {
  switch (mode) {
    case BarycenterMode::Zero:
      return "zero";
    case BarycenterMode::Mean:
      return "mean";
    case BarycenterMode::Symmetric:
      return "symmetric";
  }
  return "mean";
}

BarycenterMode barycenter_mode_from_string(const std::string& s) {
  if (s == "zero") return BarycenterMode::Zero;
  if (s == "mean") return BarycenterMode::Mean;
  if (s == "symmetric") return BarycenterMode::Symmetric;
  throw std::invalid_argument("unknown barycenter mode '" + s + "'");
}

ComplexVector super_constellation(const PsgVector& v) {
  const ComplexVector raw = dsp::idft(v.values);
  const int l = v.code.order();
  if (raw.size() != l) throw std::invalid_argument("PSG vector length must equal the reduced PSK order");
  ComplexVector points(l);
  for (int n = 0; n < l; ++n) points(n) = raw((std::int64_t(v.code.factor()) * n) % l);
  return points;
}

Complex estimate_barycenter(const ComplexVector& points) {
  if (points.size() < 2) throw std::invalid_argument("barycenter needs at least two points");
  return points.mean();
}

Complex estimate_barycenter_symmetric(const PsgVector& v) {
  const auto l = v.values.size();
  if (l < 3) throw std::invalid_argument("symmetric barycenter needs a PSK order of at least 3");
  const Complex peak = v.values(1);
  if (peak == Complex(0.0, 0.0)) return v.values(0) / double(l);
  const Complex own_dc = -peak * std::conj(v.values(2) / peak);
  return (v.values(0) - own_dc) / double(l);
}

Complex estimate_alpha(const ComplexVector& points, Complex barycenter, const ComplexVector& ideal) {
  if (points.size() != ideal.size()) throw std::invalid_argument("point and constellation lengths differ");
  Complex acc(0.0, 0.0);
  for (Eigen::Index n = 0; n < points.size(); ++n) acc += (points(n) - barycenter) * std::conj(ideal(n));
  return acc / double(points.size());
}

namespace {

void fix_gauge(ComplexVector& eps) {
  const double phase = dsp::mean_phase(eps);
  double log_mag = 0.0;
  bool finite = true;
  for (Eigen::Index i = 0; i < eps.size(); ++i) {
    const double m = std::abs(eps(i));
    if (m <= 0.0) finite = false;
    log_mag += finite ? std::log(m) : 0.0;
  }
  const double mag = finite ? std::exp(log_mag / double(eps.size())) : 1.0;
  eps /= std::polar(mag, phase);
}

RealVector phases_deg(const ComplexVector& eps) {
  RealVector out(eps.size());
  for (Eigen::Index i = 0; i < eps.size(); ++i) out(i) = rad2deg(std::arg(eps(i)));
  return out;
}

}  // namespace

ErrorEstimate estimate_phase_errors(const PsgVector& v, const EstimatorOptions& options) {
  const ComplexVector points = super_constellation(v);
  const ComplexVector ideal = ideal_constellation(v.code);

  Complex b(0.0, 0.0);
  switch (options.barycenter) {
    case BarycenterMode::Zero:
      break;
    case BarycenterMode::Mean:
      b = estimate_barycenter(points);
      break;
    case BarycenterMode::Symmetric:
      b = estimate_barycenter_symmetric(v);
      break;
  }
  const Complex alpha = estimate_alpha(points, b, ideal);
  if (!(std::abs(alpha) > options.alpha_floor))
    throw LowSignal("normalization factor magnitude " + std::to_string(std::abs(alpha)) + " is below the floor");

  ErrorEstimate est;
  est.errors = ideal.conjugate().cwiseProduct((points.array() - b).matrix()) / alpha;
  fix_gauge(est.errors);
  est.phase_deg = phases_deg(est.errors);
  est.quality = std::abs(alpha);
  return est;
}

ErrorEstimate aggregate_estimates(std::span<const ErrorEstimate> estimates) {
  if (estimates.empty()) throw std::invalid_argument("nothing to aggregate");
  const auto l = estimates.front().errors.size();
  ComplexVector acc = ComplexVector::Zero(l);
  double weight = 0.0;
  for (const auto& e : estimates) {
    if (e.errors.size() != l) throw std::invalid_argument("estimates have different lengths");
    acc += e.quality * e.errors;
    weight += e.quality;
  }
  if (weight > 0.0) acc /= weight;
  acc /= std::polar(1.0, dsp::mean_phase(acc));

  ErrorEstimate out;
  out.errors = acc;
  out.phase_deg = phases_deg(acc);
  out.quality = weight;
  return out;
}

}  // namespace oddm
