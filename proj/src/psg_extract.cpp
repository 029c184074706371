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

#include "oddmcal/psg_extract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace oddm {

std::vector<Rational> psg_indices(int mu_t, const TxCode& tx, int ramps) {
  if (mu_t < 0 || mu_t >= ramps) throw std::out_of_range("mu_t outside [0, M)");
  const TxCode r = tx.reduced();
  std::vector<Rational> out;
  out.reserve(r.order());
  for (int g = 0; g < r.order(); ++g)
    out.push_back(mod_positive(Rational(mu_t) + Rational(g) * r.doppler_shift(ramps), ramps));
  return out;
}

std::vector<int> psg_bins(int mu_t, const TxCode& tx, int ramps) {
  std::vector<int> out;
  for (const auto& pos : psg_indices(mu_t, tx, ramps)) {
    if (!is_integer(pos))
      throw NonIntegerSpurPosition("PSG position " + to_string(pos) + " is not on the Doppler grid");
    out.push_back(static_cast<int>(pos.numerator()));
  }
  return out;
}

PsgVector extract_psg_vector(const RadarCube& cube, const Detection& det, std::size_t tx, int rx) {
  const TxCode& code = cube.codes().at(tx);
  const auto bins = psg_bins(det.doppler_bin, code, cube.doppler_bins());
  PsgVector v{tx, det.index, rx, code.reduced(), cube.doppler_bins(), ComplexVector(bins.size())};
  for (std::size_t g = 0; g < bins.size(); ++g) v.values(g) = cube(det.range_bin, bins[g], rx);
  return v;
}

namespace {

/// All line positions (every Tx, every g) of a target at mu_t.
std::vector<Rational> target_lines(const CodeSet& codes, int mu_t) {
  std::vector<Rational> out;
  for (const auto& c : codes.codes())
    for (const auto& pos : psg_indices(mu_t, c, codes.ramps())) out.push_back(pos);
  return out;
}

}  // namespace

PsgVector extract_psg_vector_compensated(const RadarCube& cube, const Detection& det, std::size_t tx, int rx,
                                         std::span<const Detection> detections) {
  if (cube.window() != Window::Rect) throw std::invalid_argument("leakage compensation requires a rect window");
  PsgVector v = extract_psg_vector(cube, det, tx, rx);
  const int ramps = cube.doppler_bins();
  const auto own_bins = psg_bins(det.doppler_bin, cube.codes().at(tx), ramps);

  std::vector<bool> excluded(ramps, false);
  for (int b : own_bins) excluded[b] = true;
  std::set<Rational> fractional;
  auto add_target = [&](int mu_t) {
    for (const auto& pos : target_lines(cube.codes(), mu_t)) {
      if (is_integer(pos))
        excluded[pos.numerator()] = true;
      else
        fractional.insert(pos);
    }
  };
  add_target(det.doppler_bin);
  for (const auto& other : detections)
    if (other.range_bin == det.range_bin && other.index != det.index) add_target(other.doppler_bin);

  std::vector<int> rows;
  for (int b = 0; b < ramps; ++b)
    if (!excluded[b]) rows.push_back(b);
  const auto ncols = static_cast<Eigen::Index>(fractional.size());
  if (ncols == 0 || static_cast<Eigen::Index>(rows.size()) <= ncols) return v;

  const std::vector<Rational> lines(fractional.begin(), fractional.end());
  Eigen::MatrixXcd basis(rows.size(), ncols);
  ComplexVector observed(rows.size());
  const auto cut = cube.doppler_cut(det.range_bin, rx);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    observed(i) = cut(rows[i]);
    for (Eigen::Index f = 0; f < ncols; ++f) basis(i, f) = dirichlet_tone(lines[f], rows[i], ramps);
  }
  const ComplexVector amps = basis.colPivHouseholderQr().solve(observed);

  for (std::size_t g = 0; g < own_bins.size(); ++g) {
    Complex leak(0.0, 0.0);
    for (Eigen::Index f = 0; f < ncols; ++f) leak += amps(f) * dirichlet_tone(lines[f], own_bins[g], ramps);
    v.values(g) -= leak;
  }
  return v;
}

double estimate_noise_power(const RadarCube& cube) {
  const auto& d = cube.samples().data;
  std::vector<double> p(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) p[i] = std::norm(d.data()[i]);
  auto mid = p.begin() + p.size() / 2;
  std::nth_element(p.begin(), mid, p.end());
  // |x|^2 of complex Gaussian noise is exponential: median = ln 2 * mean
  return *mid / std::log(2.0);
}

std::vector<Detection> detect_targets(const RadarCube& cube, int guard_bins, double threshold_db, int training_bins) {
  const int nr = cube.range_bins();
  const int m = cube.doppler_bins();
  const CodeSet& codes = cube.codes();

  Eigen::ArrayXXd power = Eigen::ArrayXXd::Zero(nr, m);
  for (int r = 0; r < nr; ++r)
    for (int q = 0; q < cube.rx_count(); ++q) power.row(r) += cube.doppler_cut(r, q).cwiseAbs2().array();
  const Eigen::ArrayXXd amplitude = power.sqrt();

  const double floor = power.maxCoeff() * 1e-12;
  const double scale = std::pow(10.0, threshold_db / 10.0);
  auto wrap = [m](int b) { return ((b % m) + m) % m; };

  struct Candidate {
    int r, bin;
    double p;
  };
  std::vector<Candidate> candidates;
  for (int r = 0; r < nr; ++r) {
    for (int b = 0; b < m; ++b) {
      const double p = power(r, b);
      if (p <= floor || p < power(r, wrap(b - 1)) || p < power(r, wrap(b + 1))) continue;
      double acc = 0.0;
      int n = 0;
      for (int o = guard_bins + 1; o <= guard_bins + training_bins; ++o) {
        acc += power(r, wrap(b - o)) + power(r, wrap(b + o));
        n += 2;
      }
      const double noise = std::max(acc / n, floor);
      if (p > noise * scale) candidates.push_back({r, b, p});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.p > b.p; });

  // Tx shifts, zero-shift Txs first so they win ties
  std::vector<Rational> shifts;
  for (const auto& c : codes.codes()) shifts.push_back(mod_positive(c.doppler_shift(m), m));
  std::stable_sort(shifts.begin(), shifts.end(),
                   [](const Rational& a, const Rational& b) { return a == Rational(0) && b != Rational(0); });

  auto floor_bin = [](const Rational& x) { return static_cast<int>(x.numerator() / x.denominator()); };
  auto line_amplitude = [&](int r, const Rational& pos) {
    if (is_integer(pos)) return amplitude(r, wrap(floor_bin(pos)));
    const int lo = floor_bin(pos);
    return std::max(amplitude(r, wrap(lo)), amplitude(r, wrap(lo + 1)));
  };

  std::vector<bool> claimed(std::size_t(nr) * m, false);
  std::vector<Detection> out;
  for (const auto& cand : candidates) {
    if (claimed[std::size_t(cand.r) * m + cand.bin]) continue;

    int best_mu = cand.bin;
    double best_score = -1.0;
    for (const auto& d : shifts) {
      std::vector<int> hyps;
      if (is_integer(d)) {
        hyps.push_back(wrap(cand.bin - floor_bin(d)));
      } else {
        hyps.push_back(wrap(cand.bin - floor_bin(d)));
        hyps.push_back(wrap(cand.bin - floor_bin(d) - 1));
      }
      for (int mu : hyps) {
        double score = 0.0;
        for (const auto& s : shifts) score += line_amplitude(cand.r, mod_positive(Rational(mu) + s, m));
        if (score > best_score) {
          best_score = score;
          best_mu = mu;
        }
      }
    }

    for (const auto& pos : target_lines(codes, best_mu)) {
      const int lo = floor_bin(pos);
      const int hi = is_integer(pos) ? lo : lo + 1;
      for (int b = lo - guard_bins; b <= hi + guard_bins; ++b) claimed[std::size_t(cand.r) * m + wrap(b)] = true;
    }
    out.push_back({static_cast<int>(out.size()), cand.r, best_mu, cand.bin,
                   std::sqrt(cand.p / cube.rx_count())});
  }
  return out;
}

bool psg_contaminated(const RadarCube& cube, const Detection& det, std::size_t tx,
                      std::span<const Detection> detections) {
  const auto own = psg_indices(det.doppler_bin, cube.codes().at(tx), cube.doppler_bins());
  const std::set<Rational> own_set(own.begin(), own.end());
  for (const auto& other : detections) {
    if (other.index == det.index || other.range_bin != det.range_bin) continue;
    for (const auto& pos : target_lines(cube.codes(), other.doppler_bin))
      if (own_set.count(pos)) return true;
  }
  return false;
}

std::vector<int> spur_members(const CodeSet& codes, std::size_t tx) {
  const TxCode& code = codes.at(tx);
  const auto offsets = spur_offsets(code);
  std::set<Rational> others;
  for (std::size_t k = 0; k < codes.size(); ++k) {
    if (k == tx) continue;
    for (const auto& o : spur_offsets(codes[k])) others.insert(o);
  }
  std::vector<int> out;
  const int peak = psg_peak_index(code);
  for (int g = 0; g < static_cast<int>(offsets.size()); ++g)
    if (g != peak && !others.count(offsets[g])) out.push_back(g);
  return out;
}

double residual_spur_power(const RadarCube& cube, const Detection& det, std::size_t tx,
                           std::span<const Detection> detections, double noise_power) {
  if (noise_power < 0.0) noise_power = estimate_noise_power(cube);
  const auto members = spur_members(cube.codes(), tx);
  const int peak = psg_peak_index(cube.codes().at(tx));

  Eigen::ArrayXd spur = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(members.size()));
  double peak_power = 0.0;
  for (int q = 0; q < cube.rx_count(); ++q) {
    const PsgVector v = detections.empty() ? extract_psg_vector(cube, det, tx, q)
                                           : extract_psg_vector_compensated(cube, det, tx, q, detections);
    peak_power += std::norm(v.values(peak)) / cube.rx_count();
    for (std::size_t i = 0; i < members.size(); ++i) spur(i) += std::norm(v.values(members[i])) / cube.rx_count();
  }
  const double worst = members.empty() ? 0.0 : spur.maxCoeff();
  if (worst <= peak_power * 1e-20) return -std::numeric_limits<double>::infinity();
  if (noise_power <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(worst / noise_power);
}

Complex oddm_compensation(int mu, const TxCode& tx, int ramps) {
  const Complex s = code_spectrum_closed_form(tx, ramps, mu);
  if (std::abs(s) < 1e-9 * ramps)
    throw DirichletNull("bin " + std::to_string(mu) + " lies on a null of the code spectrum");
  return Complex(ramps, 0.0) / s;
}

}  // namespace oddm
