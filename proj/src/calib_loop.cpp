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

#include "oddmcal/calib_loop.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <stdexcept>

#include "oddmcal/dsp.hpp"

namespace oddm {

RealVector PhaseErrorSpec::resolve(int order) const {
  if (degrees) {
    if (static_cast<int>(degrees->size()) != order)
      throw std::invalid_argument("expected " + std::to_string(order) + " phase errors, got " +
                                  std::to_string(degrees->size()));
    RealVector out(order);
    for (int n = 0; n < order; ++n) out(n) = deg2rad((*degrees)[n]);
    return out;
  }
  return sample_phase_errors(order, max_deg, seed);
}

std::string to_string(FrameStatus s) {
  switch (s) {
    case FrameStatus::Updated:
      return "updated";
    case FrameStatus::Clean:
      return "clean";
    case FrameStatus::NoTarget:
      return "no_target";
    case FrameStatus::Contaminated:
      return "contaminated";
    case FrameStatus::LowSignal:
      return "low_signal";
  }
  return "unknown";
}

double max_abs_deg(const RealVector& residual_deg) {
  if (residual_deg.size() == 0) return 0.0;
  return (residual_deg.array() - residual_deg.mean()).abs().maxCoeff();
}

std::uint64_t frame_seed(std::uint64_t seed, int frame) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(frame)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (std::uint64_t(words[0]) << 32) | words[1];
}

namespace {

RealVector residual_deg(const RealVector& errors, const PsCommand& cmd) {
  RealVector out(errors.size());
  for (Eigen::Index n = 0; n < errors.size(); ++n) out(n) = errors(n) + cmd.offsets(n);
  const double mean = out.mean();
  for (Eigen::Index n = 0; n < out.size(); ++n) out(n) = rad2deg(wrap_phase(out(n) - mean));
  return out;
}

RealVector to_deg(const RealVector& rad) { return rad.unaryExpr([](double x) { return rad2deg(x); }); }

std::vector<double> tx_peaks_db(const RadarCube& cube, const Detection& det, double noise) {
  const CodeSet& codes = cube.codes();
  const int m = cube.doppler_bins();
  std::vector<double> out;
  for (std::size_t k = 0; k < codes.size(); ++k) {
    const Rational pos = mod_positive(Rational(det.doppler_bin) + codes[k].doppler_shift(m), m);
    const int bin = static_cast<int>(pos.numerator() / pos.denominator());
    double p = 0.0;
    for (int q = 0; q < cube.rx_count(); ++q) p += std::norm(cube(det.range_bin, bin, q)) / cube.rx_count();
    out.push_back(10.0 * std::log10(p / noise));
  }
  return out;
}

}  // namespace

CalibrationReport run_calibration(const CalibrationConfig& config) {
  const std::size_t i = config.tx_of_interest;
  const CodeSet cal = design_calibration_code(config.operational, i);

  CalibrationReport report;
  report.tx = i;
  report.calibration_code = cal;
  report.barycenter = config.barycenter.value_or(cal.size() == 1 ? BarycenterMode::Zero : BarycenterMode::Symmetric);
  if (report.barycenter == BarycenterMode::Symmetric && cal[i].reduced().order() < 3)
    report.barycenter = BarycenterMode::Mean;

  std::vector<RealVector> hidden;
  for (std::size_t k = 0; k < cal.size(); ++k) {
    PhaseErrorSpec spec;
    if (k < config.errors.size())
      spec = config.errors[k];
    else
      spec.seed = config.seed + 1000 + k;
    hidden.push_back(spec.resolve(cal[k].order()));
  }

  PsCommand cmd = PsCommand::zeros(cal[i].order(), quantization_step(config.quantization_bits));
  RealVector estimate = RealVector::Zero(cal[i].order());
  const bool compensate = config.leakage_compensation && config.window == Window::Rect;

  for (int f = 0; f < config.max_frames; ++f) {
    if (config.drift) config.drift(f, hidden);
    std::vector<ComplexVector> points;
    for (std::size_t k = 0; k < cal.size(); ++k) {
      const ErroneousConstellation ec(cal[k], hidden[k]);
      points.push_back(k == i ? ec.commanded_points(cmd.offsets) : ec.actual_points());
    }

    FrameRecord rec;
    rec.frame = f;
    rec.seed = frame_seed(config.seed, f);
    rec.residual_deg = residual_deg(ErroneousConstellation(cal[i], hidden[i]).phase_errors(), cmd);
    report.frames_used = f + 1;

    const RadarCube cube = simulate_frame(config.scene, cal, points, rec.seed, config.window);
    const double peak_power = cube.samples().data.cwiseAbs2().maxCoeff();
    const double noise = std::max(estimate_noise_power(cube), peak_power * 1e-15);
    const auto dets = detect_targets(cube, config.guard_bins, config.detection_threshold_db);
    rec.detections = static_cast<int>(dets.size());

    std::vector<Detection> usable;
    for (const auto& d : dets)
      if (!psg_contaminated(cube, d, i, dets)) usable.push_back(d);

    auto finish = [&](FrameStatus s) {
      rec.status = s;
      rec.estimate_deg = estimate;
      report.frames.push_back(rec);
    };
    if (usable.empty()) {
      finish(dets.empty() ? FrameStatus::NoTarget : FrameStatus::Contaminated);
      continue;
    }

    rec.tx_peak_db = tx_peaks_db(cube, usable.front(), noise);
    const std::span<const Detection> others = compensate ? std::span<const Detection>(dets) : std::span<const Detection>();
    rec.spur_db = -std::numeric_limits<double>::infinity();
    for (const auto& d : usable) rec.spur_db = std::max(rec.spur_db, residual_spur_power(cube, d, i, others, noise));
    rec.spurs_detected = rec.spur_db >= config.threshold_db;

    if (!rec.spurs_detected) {
      report.converged = true;
      finish(FrameStatus::Clean);
      if (!config.run_all_frames) break;
      continue;
    }

    EstimatorOptions opts{report.barycenter, 10.0 * std::sqrt(noise) / cal[i].reduced().order()};
    std::vector<ErrorEstimate> ests;
    for (const auto& d : usable) {
      for (int q = 0; q < cube.rx_count(); ++q) {
        const PsgVector v = compensate ? extract_psg_vector_compensated(cube, d, i, q, dets)
                                       : extract_psg_vector(cube, d, i, q);
        try {
          ests.push_back(estimate_phase_errors(v, opts));
        } catch (const LowSignal&) {
        }
      }
    }
    if (ests.empty()) {
      finish(FrameStatus::LowSignal);
      continue;
    }
    const ErrorEstimate agg = aggregate_estimates(ests);
    cmd = apply_predistortion(cmd, agg.errors, config.damping);
    estimate = agg.phase_deg;
    finish(FrameStatus::Updated);
  }

  report.true_errors_deg = to_deg(ErroneousConstellation(cal[i], hidden[i]).phase_errors());
  report.final_command_deg = to_deg(cmd.offsets);
  report.final_residual_deg = residual_deg(ErroneousConstellation(cal[i], hidden[i]).phase_errors(), cmd);
  return report;
}

std::vector<SweepEntry> sweep_tx(const CalibrationConfig& config, const std::vector<std::size_t>& txs) {
  std::vector<std::future<SweepEntry>> jobs;
  for (std::size_t tx : txs) {
    jobs.push_back(std::async(std::launch::async, [config, tx] {
      SweepEntry e;
      e.tx = tx;
      CalibrationConfig c = config;
      c.tx_of_interest = tx;
      try {
        e.report = run_calibration(c);
      } catch (const InfeasibleCode& ex) {
        e.error = ex.what();
      }
      return e;
    }));
  }
  std::vector<SweepEntry> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace oddm
