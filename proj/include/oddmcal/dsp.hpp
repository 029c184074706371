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

// Small dense transforms and sampling helpers. The L-point transforms used on
// PSG vectors are tiny (L <= a few dozen), so they are evaluated directly;
// the Doppler FFT lives in scene_sim and uses Eigen's FFT module.

#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "oddmcal/types.hpp"

namespace oddm::dsp {

/// exp(j*pi*x) for an exact rational x, reduced modulo 2 before evaluation.
inline Complex exp_j_pi(const Rational& x) {
  const Rational r = mod_positive(x, 2);
  const double a = kPi * to_double(r);
  return {std::cos(a), std::sin(a)};
}

/// sin(pi*x) for an exact rational x; exact zero on integers.
inline double sin_pi(const Rational& x) {
  if (is_integer(x)) return 0.0;
  return exp_j_pi(x).imag();
}

/// Forward DFT, X[k] = sum_n x[n] exp(-j 2 pi k n / N).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> dft(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Scalar::value_type;
  const Eigen::Index n = x.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Scalar acc(0);
    for (Eigen::Index m = 0; m < n; ++m) {
      // index product reduced mod n keeps the twiddle argument small
      const Real a = Real(-2) * std::numbers::pi_v<Real> * Real((k * m) % n) / Real(n);
      acc += x(m) * Scalar(std::cos(a), std::sin(a));
    }
    out(k) = acc;
  }
  return out;
}

/// Inverse DFT including the 1/N factor.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> idft(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Scalar::value_type;
  const Eigen::Index n = x.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Scalar acc(0);
    for (Eigen::Index m = 0; m < n; ++m) {
      const Real a = Real(2) * std::numbers::pi_v<Real> * Real((k * m) % n) / Real(n);
      acc += x(m) * Scalar(std::cos(a), std::sin(a));
    }
    out(k) = acc / Real(n);
  }
  return out;
}

/// Mean of the wrapped phase angles of a complex vector.
template <typename Derived>
double mean_phase(const Eigen::MatrixBase<Derived>& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::arg(x(i));
  return x.size() ? s / double(x.size()) : 0.0;
}

}  // namespace oddm::dsp
