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

#include "oddmcal/commands.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "oddmcal/dsp.hpp"
#include "oddmcal/io.hpp"

namespace oddm {

using nlohmann::ordered_json;

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

ordered_json vec_json(const RealVector& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// JSON has no infinities
ordered_json db_json(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json code_json(const CodeSet& codes) {
  ordered_json tx = ordered_json::array();
  for (const auto& c : codes.codes()) tx.push_back({{"L", c.order()}, {"p", c.factor()}});
  return {{"M", codes.ramps()}, {"tx", tx}};
}

}  // namespace

int cmd_feasibility(const RunConfig& config, std::optional<std::size_t> tx, std::ostream& out, std::ostream& text) {
  const CodeSet& codes = config.code;
  const std::size_t want = tx.value_or(config.calibration.tx_of_interest);
  if (want >= codes.size()) throw ConfigError("requested Tx " + std::to_string(want) + " is not configured");

  ordered_json j;
  j["requested_tx"] = want;
  j["tx"] = ordered_json::array();
  bool feasible = false;
  for (std::size_t k = 0; k < codes.size(); ++k) {
    const Feasibility s = feasibility_strict(codes, k);
    const Feasibility g = feasibility_gcd(codes, k);
    j["tx"].push_back({{"index", k},
                       {"L", codes[k].order()},
                       {"p", codes[k].factor()},
                       {"strict_ratio", to_string(s.ratio)},
                       {"strict_feasible", s.feasible},
                       {"gcd_ratio", to_string(g.ratio)},
                       {"gcd_feasible", g.feasible}});
    text << "tx " << k << ": L=" << codes[k].order() << " p=" << codes[k].factor() << " strict " << to_string(s.ratio)
         << (s.feasible ? " ok" : " no") << ", gcd " << to_string(g.ratio) << (g.feasible ? " ok" : " no") << "\n";
    if (k == want) feasible = g.feasible;
  }
  j["feasible"] = feasible;
  out << j.dump(2) << "\n";
  return feasible ? kExitOk : kExitInfeasible;
}

int cmd_table(Criterion criterion, int max_ntx, std::ostream& out) {
  out << "ntx,min_order,example\n";
  for (const auto& row : min_psk_order_table(max_ntx, criterion)) {
    out << row.num_tx << "," << row.min_order << ",";
    for (std::size_t k = 0; k < row.example.size(); ++k) out << (k ? " " : "") << row.example[k];
    out << "\n";
  }
  return kExitOk;
}

int cmd_spectrum(const RunConfig& config, std::size_t tx, std::ostream& out) {
  const CodeSet& codes = config.code;
  if (tx >= codes.size()) throw ConfigError("requested Tx " + std::to_string(tx) + " is not configured");
  const int m = codes.ramps();
  const ComplexVector direct = dsp::dft(gen_code(codes[tx], m));
  out << "bin,closed_abs,closed_phase,dft_abs\n";
  for (int mu = 0; mu < m; ++mu) {
    const Complex s = code_spectrum_closed_form(codes[tx], m, mu);
    out << mu << "," << fmt(std::abs(s)) << "," << fmt(std::abs(s) > 0.0 ? std::arg(s) : 0.0) << ","
        << fmt(std::abs(direct(mu))) << "\n";
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& config, std::ostream& log) {
  const CodeSet& codes = config.code;
  std::vector<ComplexVector> points;
  for (std::size_t k = 0; k < codes.size(); ++k) {
    if (k < config.errors.size())
      points.push_back(ErroneousConstellation(codes[k], config.errors[k].resolve(codes[k].order())).actual_points());
    else
      points.push_back(ideal_constellation(codes[k]));
  }
  const RadarCube cube = simulate_frame(config.scene, codes, points, config.seed, config.window);
  const auto stem = std::filesystem::path(config.output_dir) / "cube";
  export_cube(cube, stem, config.seed);
  log << "wrote " << stem.string() << ".bin and " << stem.string() << ".json\n";
  return kExitOk;
}

std::string report_json(const CalibrationReport& r) {
  ordered_json j;
  j["tx"] = r.tx;
  j["calibration_code"] = code_json(r.calibration_code);
  j["barycenter"] = to_string(r.barycenter);
  j["converged"] = r.converged;
  j["frames_used"] = r.frames_used;
  j["true_errors_deg"] = vec_json(r.true_errors_deg);
  j["final_command_deg"] = vec_json(r.final_command_deg);
  j["final_residual_deg"] = vec_json(r.final_residual_deg);
  j["final_max_abs_residual_deg"] = max_abs_deg(r.final_residual_deg);
  ordered_json frames = ordered_json::array();
  for (const auto& f : r.frames) {
    ordered_json peaks = ordered_json::array();
    for (double p : f.tx_peak_db) peaks.push_back(db_json(p));
    frames.push_back({{"frame", f.frame},
                      {"status", to_string(f.status)},
                      {"spurs_detected", f.spurs_detected},
                      {"spur_db", db_json(f.spur_db)},
                      {"detections", f.detections},
                      {"estimate_deg", vec_json(f.estimate_deg)},
                      {"residual_deg", vec_json(f.residual_deg)},
                      {"tx_peak_db", peaks},
                      {"seed", f.seed}});
  }
  j["frames"] = frames;
  return j.dump(2) + "\n";
}

std::string convergence_csv(const CalibrationReport& r) {
  std::ostringstream out;
  out << "frame,point_index,est_error_deg,spur_db,detected\n";
  for (const auto& f : r.frames)
    for (Eigen::Index n = 0; n < f.estimate_deg.size(); ++n)
      out << f.frame << "," << n << "," << fmt(f.estimate_deg(n)) << "," << fmt(f.spur_db) << ","
          << (f.spurs_detected ? 1 : 0) << "\n";
  return out.str();
}

int cmd_calibrate(const RunConfig& config, std::ostream& log) {
  const CalibrationReport report = run_calibration(calibration_config(config));
  const std::filesystem::path dir(config.output_dir);
  write_file_atomic(dir / "report.json", report_json(report));
  write_file_atomic(dir / "convergence.csv", convergence_csv(report));
  log << "tx " << report.tx << ": " << (report.converged ? "converged" : "not converged") << " after "
      << report.frames_used << " frames, max residual " << fmt(max_abs_deg(report.final_residual_deg)) << " deg\n";
  return kExitOk;
}

}  // namespace oddm
