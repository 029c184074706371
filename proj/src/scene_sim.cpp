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

#include "oddmcal/scene_sim.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "json.hpp"
#include "oddmcal/io.hpp"

namespace oddm {

std::string to_string(Window w) { return w == Window::Rect ? "rect" : "hann"; }

Window window_from_string(const std::string& s) {
  if (s == "rect") return Window::Rect;
  if (s == "hann") return Window::Hann;
  throw std::invalid_argument("unknown window '" + s + "' (expected rect or hann)");
}

Cube3::Cube3(int range_bins_, int columns_, int rx_count_)
    : range_bins(range_bins_), columns(columns_), rx_count(rx_count_) {
  if (range_bins <= 0 || columns <= 0 || rx_count <= 0) throw std::invalid_argument("cube dimensions must be positive");
  data = CubeMatrix::Zero(Eigen::Index(range_bins) * rx_count, columns);
}

RadarCube::RadarCube(Cube3 samples, CodeSet codes, Window window)
    : samples_(std::move(samples)), codes_(std::move(codes)), window_(window) {
  if (samples_.columns != codes_.ramps()) throw std::invalid_argument("Doppler bins must equal the ramp count");
}

Complex steering(const Scene& scene, std::size_t tx, int rx, const Target& target) {
  if (!scene.array || !target.angle_deg) return {1.0, 0.0};
  const double x = scene.array->tx_positions.at(tx) + scene.array->rx_positions.at(rx);
  return std::polar(1.0, kPi * x * std::sin(deg2rad(*target.angle_deg)));
}

double post_fft_noise_power(const Scene& scene, const CodeSet& codes) {
  if (!scene.snr_db) return 0.0;
  double strongest = 1.0;
  if (!scene.targets.empty()) {
    strongest = 0.0;
    for (const auto& t : scene.targets) strongest = std::max(strongest, std::abs(t.amplitude));
  }
  double weakest_gain = 1.0;
  for (const auto& c : codes.codes()) weakest_gain = std::min(weakest_gain, peak_gain(c, codes.ramps()));
  const double peak = strongest * codes.ramps() * weakest_gain;
  return peak * peak / std::pow(10.0, *scene.snr_db / 10.0);
}

namespace {

void validate(const Scene& scene, const CodeSet& codes, const std::vector<ComplexVector>& constellations) {
  if (constellations.size() != codes.size()) throw std::invalid_argument("one constellation per Tx is required");
  for (std::size_t k = 0; k < codes.size(); ++k)
    if (constellations[k].size() != codes[k].order())
      throw std::invalid_argument("constellation " + std::to_string(k) + " length does not match its PSK order");
  if (scene.array) {
    if (scene.array->tx_positions.size() != codes.size())
      throw std::invalid_argument("array Tx positions must match the Tx count");
    if (static_cast<int>(scene.array->rx_positions.size()) != scene.rx_count)
      throw std::invalid_argument("array Rx positions must match the Rx count");
  }
  for (const auto& t : scene.targets) {
    if (t.range_bin < 0 || t.range_bin >= scene.range_bins) throw std::invalid_argument("target range bin out of range");
    if (t.doppler_bin < 0 || t.doppler_bin >= codes.ramps())
      throw std::invalid_argument("target Doppler bin out of range");
  }
}

}  // namespace

SlowTime synth_slow_time(const Scene& scene, const CodeSet& codes, const std::vector<ComplexVector>& constellations,
                         std::uint64_t seed) {
  validate(scene, codes, constellations);
  const int ramps = codes.ramps();
  SlowTime out(scene.range_bins, ramps, scene.rx_count);

  // per-Tx slow-time code sequences
  std::vector<ComplexVector> sequences;
  for (std::size_t k = 0; k < codes.size(); ++k) {
    ComplexVector s(ramps);
    for (int m = 0; m < ramps; ++m) s(m) = constellations[k](m % codes[k].order());
    sequences.push_back(std::move(s));
  }

  for (const auto& t : scene.targets) {
    ComplexVector tone(ramps);
    for (int m = 0; m < ramps; ++m)
      tone(m) = t.amplitude * std::polar(1.0, 2.0 * kPi * t.doppler_bin * m / ramps + t.initial_phase);
    for (int q = 0; q < scene.rx_count; ++q) {
      ComplexVector sum = ComplexVector::Zero(ramps);
      for (std::size_t k = 0; k < codes.size(); ++k) sum += steering(scene, k, q, t) * sequences[k];
      out.line(t.range_bin, q) += tone.cwiseProduct(sum).transpose();
    }
  }

  const double noise_power = post_fft_noise_power(scene, codes);
  if (noise_power > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(noise_power / ramps / 2.0));
    for (Eigen::Index i = 0; i < out.data.size(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      out.data.data()[i] += Complex(re, im);
    }
  }
  return out;
}

RadarCube doppler_process(const SlowTime& slow_time, const CodeSet& codes, Window window) {
  const int ramps = slow_time.columns;
  if (ramps != codes.ramps()) throw std::invalid_argument("slow-time length must equal the ramp count");
  std::vector<double> w(ramps, 1.0);
  if (window == Window::Hann)
    for (int m = 0; m < ramps; ++m) w[m] = 0.5 * (1.0 - std::cos(2.0 * kPi * m / ramps));

  Cube3 out(slow_time.range_bins, ramps, slow_time.rx_count);
  Eigen::FFT<double> fft;
  std::vector<Complex> in(ramps), spec(ramps);
  for (Eigen::Index row = 0; row < slow_time.data.rows(); ++row) {
    for (int m = 0; m < ramps; ++m) in[m] = slow_time.data(row, m) * w[m];
    fft.fwd(spec, in);
    for (int m = 0; m < ramps; ++m) out.data(row, m) = spec[m];
  }
  return RadarCube(std::move(out), codes, window);
}

RadarCube simulate_frame(const Scene& scene, const CodeSet& codes, const std::vector<ComplexVector>& constellations,
                         std::uint64_t seed, Window window) {
  return doppler_process(synth_slow_time(scene, codes, constellations, seed), codes, window);
}

RadarCube simulate_frame(const Scene& scene, const CodeSet& codes,
                         const std::vector<ErroneousConstellation>& constellations, std::uint64_t seed, Window window) {
  std::vector<ComplexVector> points;
  points.reserve(constellations.size());
  for (const auto& c : constellations) points.push_back(c.actual_points());
  return simulate_frame(scene, codes, points, seed, window);
}

namespace {

void put_float_le(std::string& buf, float v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

float get_float_le(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= std::uint32_t(p[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* ext) {
  auto p = stem;
  p += ext;
  return p;
}

}  // namespace

void export_cube(const RadarCube& cube, const std::filesystem::path& stem, std::uint64_t seed) {
  std::string buf;
  buf.reserve(std::size_t(cube.range_bins()) * cube.doppler_bins() * cube.rx_count() * 8);
  for (int r = 0; r < cube.range_bins(); ++r)
    for (int mu = 0; mu < cube.doppler_bins(); ++mu)
      for (int q = 0; q < cube.rx_count(); ++q) {
        const Complex v = cube(r, mu, q);
        put_float_le(buf, static_cast<float>(v.real()));
        put_float_le(buf, static_cast<float>(v.imag()));
      }

  nlohmann::ordered_json meta;
  meta["format"] = "complex64-le";
  meta["layout"] = "range,doppler,rx";
  meta["dims"] = {{"range", cube.range_bins()}, {"doppler", cube.doppler_bins()}, {"rx", cube.rx_count()}};
  nlohmann::ordered_json tx = nlohmann::ordered_json::array();
  for (const auto& c : cube.codes().codes()) tx.push_back({{"L", c.order()}, {"p", c.factor()}});
  meta["code"] = {{"M", cube.codes().ramps()}, {"tx", tx}};
  meta["seed"] = seed;
  meta["window"] = to_string(cube.window());

  write_file_atomic(with_suffix(stem, ".bin"), buf);
  write_file_atomic(with_suffix(stem, ".json"), meta.dump(2) + "\n");
}

RadarCube import_cube(const std::filesystem::path& stem) {
  std::ifstream js(with_suffix(stem, ".json"));
  if (!js) throw std::runtime_error("cannot open cube sidecar " + with_suffix(stem, ".json").string());
  const auto meta = nlohmann::json::parse(js);
  const int nr = meta.at("dims").at("range");
  const int nd = meta.at("dims").at("doppler");
  const int nq = meta.at("dims").at("rx");
  std::vector<TxCode> codes;
  for (const auto& t : meta.at("code").at("tx")) codes.emplace_back(t.at("L").get<int>(), t.at("p").get<int>());
  CodeSet set(meta.at("code").at("M").get<int>(), std::move(codes));

  std::ifstream bin(with_suffix(stem, ".bin"), std::ios::binary);
  std::string raw((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
  if (raw.size() != std::size_t(nr) * nd * nq * 8) throw std::runtime_error("cube payload size mismatch");
  Cube3 out(nr, nd, nq);
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  for (int r = 0; r < nr; ++r)
    for (int mu = 0; mu < nd; ++mu)
      for (int q = 0; q < nq; ++q, p += 8) out(r, mu, q) = Complex(get_float_le(p), get_float_le(p + 4));
  return RadarCube(std::move(out), std::move(set), window_from_string(meta.at("window").get<std::string>()));
}

}  // namespace oddm
