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

#include <filesystem>
#include <cstring>
#include <fstream>
#include <set>

#include <json.hpp>

#include "oddmcal/scene_sim.hpp"

using namespace oddm;

namespace {

Scene one_target(int range_bin, double mu, double amplitude = 1.0, double phase = 0.0) {
  Scene s;
  s.range_bins = 8;
  s.rx_count = 2;
  s.targets.push_back({range_bin, mu, amplitude, phase, std::nullopt});
  return s;
}

std::vector<ComplexVector> ideal(const CodeSet& codes) {
  std::vector<ComplexVector> out;
  for (const auto& c : codes.codes()) out.push_back(ideal_constellation(c));
  return out;
}

std::set<int> nonzero_bins(const RadarCube& cube, int r, int q, double tol) {
  std::set<int> out;
  for (int mu = 0; mu < cube.doppler_bins(); ++mu)
    if (std::abs(cube(r, mu, q)) > tol) out.insert(mu);
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("slow-time synthesis of a single unmodulated Tx is a pure tone") {
  const CodeSet codes(64, {TxCode(1, 0)});
  const Scene s = one_target(3, 5.0, 2.0, 0.4);
  const SlowTime st = synth_slow_time(s, codes, ideal(codes), 1);
  for (int q = 0; q < s.rx_count; ++q)
    for (int m = 0; m < 64; ++m)
      CHECK(std::abs(st(3, m, q) - std::polar(2.0, 2 * kPi * 5.0 * m / 64 + 0.4)) < 1e-12);
  for (int r = 0; r < s.range_bins; ++r)
    if (r != 3) CHECK(st.line(r, 0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("slow-time synthesis applies the code sequence") {
  const CodeSet codes(64, {TxCode(4, 1)});
  const Scene s = one_target(0, 7.0);
  const SlowTime st = synth_slow_time(s, codes, ideal(codes), 1);
  const ComplexVector c = gen_code(codes[0], 64);
  for (int m = 0; m < 64; ++m) CHECK(std::abs(st(0, m, 1) - std::polar(1.0, 2 * kPi * 7.0 * m / 64) * c(m)) < 1e-12);
}

TEST_CASE("Doppler processing of a pure tone") {
  const CodeSet codes(128, {TxCode(1, 0)});
  const RadarCube cube = simulate_frame(one_target(2, 17.0, 0.5), codes, ideal(codes), 1);
  CHECK(nonzero_bins(cube, 2, 0, 1e-9) == std::set<int>{17});
  CHECK(std::abs(cube(2, 17, 0)) == doctest::Approx(128 * 0.5));
}

TEST_CASE("Hann window spreads a tone over three bins") {
  const CodeSet codes(128, {TxCode(1, 0)});
  const RadarCube cube = simulate_frame(one_target(2, 17.0), codes, ideal(codes), 1, Window::Hann);
  CHECK(nonzero_bins(cube, 2, 0, 1e-9) == std::set<int>{16, 17, 18});
  CHECK(cube.window() == Window::Hann);
}

TEST_CASE("integer shifts move the whole spectrum") {
  const CodeSet mod(256, {TxCode(8, 1)});
  const CodeSet plain(256, {TxCode(1, 0)});
  const Scene s = one_target(1, 40.0, 1.0, 0.3);
  const RadarCube a = simulate_frame(s, mod, ideal(mod), 1);
  const RadarCube b = simulate_frame(s, plain, ideal(plain), 1);
  for (int q = 0; q < s.rx_count; ++q)
    for (int mu = 0; mu < 256; ++mu) CHECK(std::abs(a(1, (mu + 32) % 256, q) - b(1, mu, q)) < 1e-9);
}

TEST_CASE("three-Tx QPSK frame puts one peak per Tx") {
  const CodeSet codes(256, {TxCode(4, 1), TxCode(4, 0), TxCode(4, 2)});
  const RadarCube cube = simulate_frame(one_target(0, 28.0), codes, ideal(codes), 1);
  CHECK(nonzero_bins(cube, 0, 0, 1e-9) == std::set<int>{28, 92, 156});
  for (int mu : {28, 92, 156}) CHECK(std::abs(cube(0, mu, 0)) == doctest::Approx(256));
}

TEST_CASE("erroneous constellations only add lines on the spur grid") {
  const CodeSet codes(256, {TxCode(1, 0), TxCode(8, 1), TxCode(4, 1)});
  std::vector<ErroneousConstellation> cons;
  for (std::size_t k = 0; k < codes.size(); ++k)
    cons.emplace_back(codes[k], sample_phase_errors(codes[k].order(), 10.0, 10 + k));
  const RadarCube cube = simulate_frame(one_target(4, 28.0), codes, cons, 1);
  std::set<int> grid;
  for (const auto& c : codes.codes())
    for (int g = 0; g < c.order(); ++g) grid.insert((28 + g * 256 / c.order()) % 256);
  for (int mu : nonzero_bins(cube, 4, 0, 1e-9)) CHECK(grid.count(mu));
  CHECK(nonzero_bins(cube, 4, 0, 1e-9).size() > 3);
}

TEST_CASE("Doppler cube equals the sum of shifted single-Tx cubes") {
  const CodeSet codes(256, {TxCode(1, 0), TxCode(8, 1), TxCode(4, 1), TxCode(2, 1)});
  const CodeSet plain(256, {TxCode(1, 0)});
  Scene s = one_target(5, 40.0, 1.0, 0.2);
  s.targets.push_back({5, 100.0, 0.7, -1.0, std::nullopt});
  s.range_bins = 64;
  s.rx_count = 4;
  const RadarCube joint = simulate_frame(s, codes, ideal(codes), 1);
  const RadarCube single = simulate_frame(s, plain, ideal(plain), 1);
  double err = 0.0;
  for (int r = 0; r < 64; ++r)
    for (int q = 0; q < 4; ++q)
      for (int mu = 0; mu < 256; ++mu) {
        Complex sum(0, 0);
        for (const auto& c : codes.codes()) {
          const int d = int(c.doppler_shift(256).numerator());
          sum += single(r, ((mu - d) % 256 + 256) % 256, q);
        }
        err = std::max(err, std::abs(joint(r, mu, q) - sum));
      }
  CHECK(err < 1e-9);
}

TEST_CASE("linearity over targets") {
  const CodeSet codes(128, {TxCode(1, 0), TxCode(3, 1)});
  std::vector<ErroneousConstellation> cons = {ErroneousConstellation(codes[0], RealVector::Zero(1)),
                                              ErroneousConstellation(codes[1], sample_phase_errors(3, 10, 4))};
  Scene a = one_target(1, 10.0);
  Scene b = one_target(6, 50.5, 0.3, 1.0);
  Scene ab = a;
  ab.targets.push_back(b.targets[0]);
  const auto ca = simulate_frame(a, codes, cons, 1);
  const auto cb = simulate_frame(b, codes, cons, 1);
  const auto cab = simulate_frame(ab, codes, cons, 1);
  CHECK((cab.samples().data - ca.samples().data - cb.samples().data).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Parseval") {
  const CodeSet codes(128, {TxCode(1, 0), TxCode(6, 1)});
  Scene s = one_target(1, 10.3);
  s.snr_db = 20.0;
  const SlowTime st = synth_slow_time(s, codes, ideal(codes), 9);
  const RadarCube cube = doppler_process(st, codes);
  CHECK(st.energy() == doctest::Approx(cube.samples().energy() / 128).epsilon(1e-10));
}

TEST_CASE("noise level follows the SNR definition") {
  const CodeSet codes(256, {TxCode(1, 0)});
  Scene s;
  s.range_bins = 32;
  s.rx_count = 4;
  s.snr_db = 30.0;
  CHECK(post_fft_noise_power(s, codes) == doctest::Approx(256.0 * 256.0 / 1000.0));
  const RadarCube cube = simulate_frame(s, codes, ideal(codes), 5);
  const double measured = cube.samples().energy() / double(cube.samples().data.size());
  CHECK(std::abs(10 * std::log10(measured / post_fft_noise_power(s, codes))) < 0.5);

  s.snr_db.reset();
  CHECK(post_fft_noise_power(s, codes) == 0.0);
}

TEST_CASE("noise reference is the weakest Tx peak") {
  const CodeSet codes(256, {TxCode(1, 0), TxCode(3, 1)});
  Scene s = one_target(0, 10.0, 2.0);
  s.snr_db = 20.0;
  const double peak = 2.0 * 256 * peak_gain(codes[1], 256);
  CHECK(post_fft_noise_power(s, codes) == doctest::Approx(peak * peak / 100.0));
}

TEST_CASE("ideal peaks survive small zero-mean errors to second order") {
  const CodeSet codes(256, {TxCode(4, 1)});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RealVector d = sample_phase_errors(4, 10.0, seed);
    const RadarCube err = simulate_frame(one_target(0, 20.0), codes, {ErroneousConstellation(codes[0], d)}, 1);
    const RadarCube ref = simulate_frame(one_target(0, 20.0), codes, ideal(codes), 1);
    const double dmax = d.cwiseAbs().maxCoeff();
    CHECK(std::abs(err(0, 84, 0) / ref(0, 84, 0) - 1.0) <= dmax * dmax);
  }
}

TEST_CASE("steering phases") {
  const CodeSet codes(64, {TxCode(1, 0), TxCode(2, 1)});
  Scene s = one_target(0, 8.0);
  s.targets[0].angle_deg = 30.0;
  CHECK(steering(s, 1, 1, s.targets[0]) == Complex(1, 0));
  s.array = ArrayGeometry{{0.0, 4.0}, {0.0, 1.0}};
  const Complex w = steering(s, 1, 1, s.targets[0]);
  CHECK(std::arg(w) == doctest::Approx(wrap_phase(kPi * 5.0 * 0.5)));
  const RadarCube cube = simulate_frame(s, codes, ideal(codes), 1);
  CHECK(std::abs(cube(0, 40, 1) - 64.0 * w) < 1e-9);
}

TEST_CASE("simulation is deterministic per seed") {
  const CodeSet codes(128, {TxCode(1, 0), TxCode(3, 1)});
  Scene s = one_target(1, 10.0);
  s.snr_db = 10.0;
  const auto a = simulate_frame(s, codes, ideal(codes), 42);
  const auto b = simulate_frame(s, codes, ideal(codes), 42);
  const auto c = simulate_frame(s, codes, ideal(codes), 43);
  CHECK(a.samples().data == b.samples().data);
  CHECK(a.samples().data != c.samples().data);
}

TEST_CASE("input validation") {
  const CodeSet codes(64, {TxCode(4, 1)});
  CHECK_THROWS_AS(simulate_frame(one_target(0, 1.0), codes, {ComplexVector::Ones(3)}, 1), std::invalid_argument);
  CHECK_THROWS_AS(simulate_frame(one_target(8, 1.0), codes, ideal(codes), 1), std::invalid_argument);
  CHECK_THROWS_AS(simulate_frame(one_target(0, 64.0), codes, ideal(codes), 1), std::invalid_argument);
  Scene s = one_target(0, 1.0);
  s.array = ArrayGeometry{{0.0, 1.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(simulate_frame(s, codes, ideal(codes), 1), std::invalid_argument);
  CHECK_THROWS_AS(window_from_string("blackman"), std::invalid_argument);
}

TEST_CASE("cube export and import") {
  const CodeSet codes(64, {TxCode(1, 0), TxCode(3, 1)});
  Scene s = one_target(2, 9.0);
  s.snr_db = 30.0;
  const RadarCube cube = simulate_frame(s, codes, ideal(codes), 3, Window::Hann);
  const auto dir = std::filesystem::temp_directory_path() / "oddmcal_test_export";
  std::filesystem::remove_all(dir);
  const auto stem = dir / "cube";
  export_cube(cube, stem, 3);

  CHECK(std::filesystem::file_size(dir / "cube.bin") == std::uintmax_t(8) * 64 * 2 * 8);
  const auto meta = nlohmann::json::parse(slurp(dir / "cube.json"));
  CHECK(meta.at("format") == "complex64-le");
  CHECK(meta.at("dims").at("doppler") == 64);
  CHECK(meta.at("code").at("tx").size() == 2);
  CHECK(meta.at("seed") == 3);
  CHECK(meta.at("window") == "hann");

  // first sample, little-endian float32 pair
  const std::string raw = slurp(dir / "cube.bin");
  float re = 0.0f, im = 0.0f;
  std::memcpy(&re, raw.data(), 4);
  std::memcpy(&im, raw.data() + 4, 4);
  CHECK(re == static_cast<float>(cube(0, 0, 0).real()));
  CHECK(im == static_cast<float>(cube(0, 0, 0).imag()));

  const RadarCube back = import_cube(stem);
  CHECK(back.codes() == cube.codes());
  CHECK(back.window() == Window::Hann);
  const double scale = cube.samples().data.cwiseAbs().maxCoeff();
  CHECK((back.samples().data - cube.samples().data).cwiseAbs().maxCoeff() <= scale * 1e-6);

  export_cube(cube, stem, 3);
  CHECK(slurp(dir / "cube.bin") == raw);
  CHECK(!std::filesystem::exists(dir / "cube.bin.tmp"));
  std::filesystem::remove_all(dir);
}
