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

#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <boost/rational.hpp>

namespace oddm {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Exact rational used for every Doppler-bin position and feasibility ratio.
using Rational = boost::rational<std::int64_t>;

inline constexpr double kPi = std::numbers::pi;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double rad) {
  double w = std::remainder(rad, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

inline bool is_integer(const Rational& r) { return r.denominator() == 1; }

inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

/// Reduces r into [0, m).
inline Rational mod_positive(Rational r, std::int64_t m) {
  // r = n/d; n mod (m*d) keeps the value exact.
  const std::int64_t d = r.denominator();
  std::int64_t n = r.numerator() % (m * d);
  if (n < 0) n += m * d;
  return Rational(n, d);
}

std::string to_string(const Rational& r);

// Error types. Precondition violations use the std exceptions directly.

class NonIntegerSpurPosition : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LowSignal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleCode : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DirichletNull : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoTargetDetected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oddm
