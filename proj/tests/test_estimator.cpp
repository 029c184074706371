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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oddmcal/dsp.hpp"
#include "oddmcal/estimator.hpp"

using namespace oddm;

namespace {

Scene scene_at(double mu, double amplitude, double phase, int rx = 1, std::optional<double> snr = std::nullopt) {
  Scene s;
  s.range_bins = 4;
  s.rx_count = rx;
  s.snr_db = snr;
  s.targets.push_back({1, mu, amplitude, phase, std::nullopt});
  return s;
}

PsgVector single_tx_psg(const TxCode& tx, const RealVector& delta, Complex a, int mu = 24) {
  const CodeSet codes(256, {tx});
  const RadarCube cube =
      simulate_frame(scene_at(mu, std::abs(a), std::arg(a)), codes, {ErroneousConstellation(tx, delta)}, 1);
  return extract_psg_vector(cube, Detection{0, 1, mu, mu, 0.0}, 0, 0);
}

RealVector deg(std::initializer_list<double> v) {
  RealVector out(v.size());
  int i = 0;
  for (double x : v) out(i++) = deg2rad(x);
  return out;
}

const CodeSet kCalibration(256, {TxCode(1, 0), TxCode(3, 1), TxCode(4, 1), TxCode(3, 2)});

}  // namespace

TEST_CASE("super-constellation of a constant PSG vector") {
  PsgVector v;
  v.code = TxCode(4, 1);
  v.ramps = 256;
  const Complex a(0.3, -0.2);
  v.values = ComplexVector::Zero(4);
  v.values(0) = 256.0 * a;
  const ComplexVector pts = super_constellation(v);
  for (int n = 0; n < 4; ++n) CHECK(std::abs(pts(n) - a * 64.0) < 1e-12);

  v.values = ComplexVector::Zero(3);
  CHECK_THROWS_AS(super_constellation(v), std::invalid_argument);
}

TEST_CASE("super-constellation inverts the PSG extraction") {
  std::mt19937_64 rng(5);
  for (int l : {2, 3, 4, 8, 16}) {
    for (int p = 1; p < l; ++p) {
      if (std::gcd(l, p) != 1 || 256 % l) continue;
      const TxCode tx(l, p);
      const RealVector d = sample_phase_errors(l, 30.0, rng());
      const Complex a = std::polar(0.7, 1.1);
      const ComplexVector pts = super_constellation(single_tx_psg(tx, d, a));
      const ComplexVector expected = ErroneousConstellation(tx, d).actual_points() * a * (256.0 / l);
      CHECK((pts - expected).cwiseAbs().maxCoeff() <= 1e-10 * expected.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("barycenter") {
  const ComplexVector c = ideal_constellation(TxCode(4, 1));
  const Complex alpha(2.0, 1.0);
  CHECK(std::abs(estimate_barycenter(alpha * c)) < 1e-14);
  const Complex off(0.1, -0.3);
  CHECK(std::abs(estimate_barycenter((alpha * c).array() + off) - off) < 1e-14);
  CHECK_THROWS_AS(estimate_barycenter(ComplexVector::Ones(1)), std::invalid_argument);

  // first-order effect of zero-mean phase errors
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const RealVector d = sample_phase_errors(4, 10.0, seed);
    const ComplexVector pts = alpha * ErroneousConstellation(TxCode(4, 1), d).actual_points();
    CHECK(std::abs(estimate_barycenter(pts)) <= std::abs(alpha) * d.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("alpha") {
  const ComplexVector c = ideal_constellation(TxCode(4, 1));
  const Complex alpha(-1.5, 0.25);
  const Complex b(0.4, 0.4);
  CHECK(std::abs(estimate_alpha((alpha * c).array() + b, b, c) - alpha) < 1e-14);
  CHECK(std::abs(estimate_alpha(ComplexVector::Zero(4), 0.0, c)) == 0.0);
  CHECK_THROWS_AS(estimate_alpha(ComplexVector::Zero(3), 0.0, c), std::invalid_argument);

  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const RealVector d = sample_phase_errors(4, 10.0, seed);
    const ComplexVector pts = alpha * ErroneousConstellation(TxCode(4, 1), d).actual_points();
    CHECK(std::abs(estimate_alpha(pts, estimate_barycenter(pts), c) / alpha - 1.0) <= 0.02);
  }
}

TEST_CASE("phase-error recovery from a noiseless single Tx") {
  const RealVector d = deg({2, -1, -3, 2});
  const PsgVector v = single_tx_psg(TxCode(4, 1), d, std::polar(1.0, 0.3));
  const ErrorEstimate e = estimate_phase_errors(v, {BarycenterMode::Zero, 0.0});
  for (int n = 0; n < 4; ++n) CHECK(std::abs(e.phase_deg(n) - rad2deg(d(n))) < 1e-8);
  CHECK(e.quality == doctest::Approx(64.0 * std::abs(ErroneousConstellation(TxCode(4, 1), d).errors().mean())));

  // the symmetric barycenter is second order in the errors
  const ErrorEstimate s = estimate_phase_errors(v, {BarycenterMode::Symmetric, 0.0});
  const double dmax = d.cwiseAbs().maxCoeff();
  for (int n = 0; n < 4; ++n) CHECK(std::abs(s.phase_deg(n) - rad2deg(d(n))) < rad2deg(dmax * dmax));

  const ErrorEstimate zero = estimate_phase_errors(single_tx_psg(TxCode(4, 1), RealVector::Zero(4), 1.0));
  CHECK((zero.errors.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("exact round trip for large errors") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int orders[] = {3, 4, 8, 16};
    const int l = orders[rng() % 4];
    if (256 % l) continue;
    const TxCode tx(l, 1);
    const ErroneousConstellation truth(tx, sample_phase_errors(l, 45.0, rng()));
    const Complex a = std::polar(0.1 + (rng() % 100) / 50.0, double(rng() % 628) / 100.0);
    const ErrorEstimate e =
        estimate_phase_errors(single_tx_psg(tx, truth.phase_errors(), a), {BarycenterMode::Zero, 0.0});
    CHECK((e.errors - truth.errors()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("common phase of the points does not change the estimate") {
  const RealVector d = sample_phase_errors(4, 10.0, 2);
  const PsgVector v = single_tx_psg(TxCode(4, 1), d, 1.0);
  PsgVector w = v;
  w.values *= std::polar(1.0, 0.9);
  const ErrorEstimate ev = estimate_phase_errors(v, {BarycenterMode::Mean, 0.0});
  const ErrorEstimate ew = estimate_phase_errors(w, {BarycenterMode::Mean, 0.0});
  CHECK((ev.errors - ew.errors).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("low signal is rejected") {
  PsgVector v;
  v.code = TxCode(4, 1);
  v.ramps = 256;
  v.values = ComplexVector::Zero(4);
  CHECK_THROWS_AS(estimate_phase_errors(v, {BarycenterMode::Mean, 0.0}), LowSignal);
  v.values(1) = 1.0;
  CHECK_THROWS_AS(estimate_phase_errors(v, {BarycenterMode::Mean, 1.0}), LowSignal);
  CHECK_NOTHROW(estimate_phase_errors(v, {BarycenterMode::Mean, 0.1}));
}

TEST_CASE("barycenter mode names") {
  for (auto m : {BarycenterMode::Zero, BarycenterMode::Mean, BarycenterMode::Symmetric})
    CHECK(barycenter_mode_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(barycenter_mode_from_string("median"), std::invalid_argument);
}

TEST_CASE("symmetric barycenter removes only the other Txs") {
  std::vector<ErroneousConstellation> cons;
  for (std::size_t k = 0; k < kCalibration.size(); ++k)
    cons.emplace_back(kCalibration[k], sample_phase_errors(kCalibration[k].order(), 10.0, 30 + k));
  const Scene s = scene_at(40, 1.0, 0.2);
  const RadarCube cube = simulate_frame(s, kCalibration, cons, 1);
  const Detection det{0, 1, 40, 40, 0.0};
  const std::vector<Detection> dets = {det};
  const PsgVector v = extract_psg_vector_compensated(cube, det, 2, 0, dets);

  // offset put on the super-constellation by the unmodulated Tx
  const Complex other = 256.0 * std::polar(1.0, 0.2) * cons[0].actual_points()(0) / 4.0;
  const double scale = 64.0;
  const double err_sym = std::abs(estimate_barycenter_symmetric(v) - other) / scale;
  const double err_mean = std::abs(estimate_barycenter(super_constellation(v)) - other) / scale;
  const double dmax = cons[2].phase_errors().cwiseAbs().maxCoeff();
  CHECK(err_sym <= dmax * dmax);
  CHECK(err_sym < err_mean);

  PsgVector two = v;
  two.values = ComplexVector::Ones(2);
  CHECK_THROWS_AS(estimate_barycenter_symmetric(two), std::invalid_argument);
}

TEST_CASE("estimates in the four-Tx calibration code") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<ErroneousConstellation> cons;
    for (std::size_t k = 0; k < kCalibration.size(); ++k)
      cons.emplace_back(kCalibration[k], sample_phase_errors(kCalibration[k].order(), 10.0, 100 * seed + k));
    const RadarCube cube = simulate_frame(scene_at(40, 1.0, 0.0, 4, 50.0), kCalibration, cons, seed);
    const auto dets = detect_targets(cube);
    REQUIRE(dets.size() == 1);
    std::vector<ErrorEstimate> all;
    for (int q = 0; q < 4; ++q)
      all.push_back(estimate_phase_errors(extract_psg_vector_compensated(cube, dets[0], 2, q, dets),
                                          {BarycenterMode::Symmetric, 0.0}));
    const ErrorEstimate e = aggregate_estimates(all);
    for (int n = 0; n < 4; ++n) CHECK(std::abs(e.phase_deg(n) - rad2deg(cons[2].phase_errors()(n))) < 1.0);
  }
}

TEST_CASE("aggregation") {
  ErrorEstimate a;
  a.errors = ComplexVector(3);
  a.errors << std::polar(1.0, 0.1), std::polar(1.0, -0.3), std::polar(1.0, 0.2);
  a.quality = 2.0;
  const ErrorEstimate one = aggregate_estimates(std::vector<ErrorEstimate>{a});
  CHECK(std::abs(one.phase_deg.mean()) < 1e-12);
  CHECK(one.phase_deg(1) - one.phase_deg(0) == doctest::Approx(rad2deg(-0.4)));
  const ErrorEstimate two = aggregate_estimates(std::vector<ErrorEstimate>{a, a});
  CHECK((two.errors - one.errors).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(two.quality == doctest::Approx(4.0));

  ErrorEstimate b = a;
  b.errors = ComplexVector(2);
  CHECK_THROWS_AS(aggregate_estimates(std::vector<ErrorEstimate>{a, b}), std::invalid_argument);
  CHECK_THROWS_AS(aggregate_estimates(std::vector<ErrorEstimate>{}), std::invalid_argument);

  // independent noise averages down
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.05);
  double var_single = 0.0, var_agg = 0.0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    std::vector<ErrorEstimate> batch;
    for (int k = 0; k < 8; ++k) {
      ErrorEstimate e;
      e.errors = ComplexVector(4);
      for (int n = 0; n < 4; ++n) e.errors(n) = std::polar(1.0, noise(rng));
      e.errors /= std::polar(1.0, dsp::mean_phase(e.errors));
      e.quality = 1.0;
      batch.push_back(e);
    }
    for (int n = 0; n < 4; ++n) var_single += std::pow(std::arg(batch[0].errors(n)), 2);
    const ErrorEstimate agg = aggregate_estimates(batch);
    for (int n = 0; n < 4; ++n) var_agg += std::pow(std::arg(agg.errors(n)), 2);
  }
  CHECK(var_agg < var_single / 4);
}
