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

// DDM / ODDM phase codes: sequence generation, closed-form Doppler spectra,
// estimability conditions and calibration-code design.

#pragma once

#include <cstddef>
#include <vector>

#include "oddmcal/types.hpp"

namespace oddm {

/// One transmitter's PSK phase code: order L and factor p with 0 <= p < L.
/// The ramp-to-ramp phase step is 2*pi*p/L and the Doppler shift is M*p/L bins.
class TxCode {
 public:
  TxCode(int order, int factor);

  int order() const { return order_; }
  int factor() const { return factor_; }

  /// Lowest-terms form; generates the identical sequence.
  TxCode reduced() const;

  double phase_step() const;

  /// p/L as an exact fraction of the Doppler axis.
  Rational normalized_shift() const { return Rational(factor_, order_); }

  /// Doppler shift in bins for a frame of `ramps` ramps.
  Rational doppler_shift(int ramps) const { return normalized_shift() * std::int64_t(ramps); }

  friend bool operator==(const TxCode&, const TxCode&) = default;

 private:
  int order_;
  int factor_;
};

/// The modulation plan of one frame: the ramp count and one code per Tx.
class CodeSet {
 public:
  CodeSet(int ramps, std::vector<TxCode> codes);

  int ramps() const { return ramps_; }
  std::size_t size() const { return codes_.size(); }
  const TxCode& operator[](std::size_t i) const { return codes_[i]; }
  const TxCode& at(std::size_t i) const { return codes_.at(i); }
  const std::vector<TxCode>& codes() const { return codes_; }

  /// Reduced orders, in Tx order.
  std::vector<int> reduced_orders() const;

  /// True when all Txs occupy pairwise distinct Doppler shifts.
  bool shifts_distinct() const;

  /// Smallest circular distance between two Tx Doppler shifts, in bins.
  Rational min_shift_distance() const;

  friend bool operator==(const CodeSet&, const CodeSet&) = default;

 private:
  int ramps_;
  std::vector<TxCode> codes_;
};

/// Slow-time code, element m = exp(j (m mod L) phi).
ComplexVector gen_code(const TxCode& tx, int ramps);

/// The L ideal constellation points exp(j n phi), n = 0..L-1.
ComplexVector ideal_constellation(const TxCode& tx);

/// M-point DFT, evaluated at bin `bin`, of a unit tone at `shift` bins:
/// sum_m exp(j 2 pi (shift - bin) m / M). Exact case split for integer shifts.
Complex dirichlet_tone(const Rational& shift, int bin, int ramps);

/// Closed-form Doppler spectrum of an ideal code at bin mu (Dirichlet kernel).
Complex code_spectrum_closed_form(const TxCode& tx, int ramps, int mu);

/// Largest spectral magnitude of the ideal code divided by M (1 for integer shifts,
/// the scalloping loss at the nearest bin otherwise).
double peak_gain(const TxCode& tx, int ramps);

struct Feasibility {
  Rational ratio;
  bool feasible = false;
};

/// L_i / prod_{k != i} L_k > 2, on reduced orders.
Feasibility feasibility_strict(const CodeSet& codes, std::size_t i);

/// L_i / prod_{k != i} gcd(L_i, L_k) > 2, on reduced orders.
Feasibility feasibility_gcd(const CodeSet& codes, std::size_t i);

enum class Criterion { Strict, Gcd };

struct MinOrderRow {
  int num_tx = 0;
  int min_order = 0;
  std::vector<int> example;
};

/// Smallest order L_0 that makes Tx 0 estimable for N_tx = 2..max_ntx.
///
/// Every Tx needs its own Doppler shift, so a reduced order L can be used by at
/// most phi(L) transmitters (the distinct fractions p/L). Strict mode searches
/// powers of two up to 1024, gcd mode all integers up to 1024. Other orders
/// never exceed L_0.
std::vector<MinOrderRow> min_psk_order_table(int max_ntx, Criterion criterion);

/// Keeps Tx i's code and reassigns the others so that the gcd condition holds
/// for Tx i with pairwise distinct Doppler shifts. Candidate orders grow from 1;
/// among valid assignments with the smallest maximum order the one with the
/// widest minimum Doppler separation wins, then the lexicographically first.
/// Throws InfeasibleCode when the reduced L_i <= 2.
CodeSet design_calibration_code(const CodeSet& operational, std::size_t i);

/// Fractional PSG offsets {g p'/L' mod 1 : g = 0..L'-1} of a reduced code.
std::vector<Rational> spur_offsets(const TxCode& tx);

/// Number of coinciding PSG offsets between two codes (exact). Equals gcd(L'_a, L'_b).
int spur_overlap_count(const TxCode& a, const TxCode& b);

int euler_phi(int n);

}  // namespace oddm
