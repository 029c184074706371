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

#include "oddmcal/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace oddm {

using nlohmann::json;

namespace {

/// A JSON object whose keys are checked against an allowed set.
class Section {
 public:
  Section(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
    for (const auto& [key, value] : j_.items())
      if (!allowed.count(key)) throw ConfigError("unknown key '" + key_path(key) + "'");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& raw(const std::string& key) const {
    if (!j_.contains(key)) throw ConfigError("missing key '" + key_path(key) + "'");
    return j_.at(key);
  }
  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  std::int64_t integer(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError("'" + key_path(key) + "' must be an integer");
    return v.get<std::int64_t>();
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    return has(key) ? integer(key) : fallback;
  }
  double number(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError("'" + key_path(key) + "' must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError("'" + key_path(key) + "' must be a boolean");
    return v.get<bool>();
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError("'" + key_path(key) + "' must be a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError("'" + key_path(key) + "' must be an array");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError("'" + key_path(key) + "' must contain numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  const json& array(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError("'" + key_path(key) + "' must be an array");
    return v;
  }

 private:
  std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }

  const json& j_;
  std::string path_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("'" + key + "' " + what);
}

CodeSet parse_code(const json& j, std::vector<std::string>& warnings) {
  const Section s(j, "code", {"M", "tx"});
  const auto m = s.integer("M");
  require(m >= 1 && m <= (1 << 20), "code.M", "must be in [1, 2^20]");
  const json& txs = s.array("tx");
  require(!txs.empty(), "code.tx", "must list at least one Tx");
  std::vector<TxCode> codes;
  for (std::size_t k = 0; k < txs.size(); ++k) {
    const std::string path = "code.tx[" + std::to_string(k) + "]";
    const Section t(txs[k], path, {"L", "p"});
    const auto l = t.integer("L");
    auto p = t.integer("p");
    require(l >= 1 && l <= 1024, path + ".L", "must be in [1, 1024]");
    require(p >= 0, path + ".p", "must be non-negative");
    if (l == 1 && p == 1) {
      warnings.push_back(path + ": L=1, p=1 normalized to p=0");
      p = 0;
    }
    require(p < l, path + ".p", "must be smaller than L");
    codes.emplace_back(int(l), int(p));
  }
  return CodeSet(int(m), std::move(codes));
}

Target parse_target(const json& j, const std::string& path, const Scene& scene, int ramps) {
  const Section s(j, path, {"range_bin", "doppler_bin", "amplitude", "phase_rad", "angle_deg"});
  Target t;
  const auto r = s.integer("range_bin");
  require(r >= 0 && r < scene.range_bins, path + ".range_bin", "must lie in [0, range_bins)");
  t.range_bin = int(r);
  t.doppler_bin = s.number("doppler_bin");
  require(t.doppler_bin >= 0.0 && t.doppler_bin < ramps, path + ".doppler_bin", "must lie in [0, M)");
  t.amplitude = s.number("amplitude", 1.0);
  require(t.amplitude >= 0.0, path + ".amplitude", "must be non-negative");
  t.initial_phase = s.number("phase_rad", 0.0);
  if (s.has("angle_deg")) t.angle_deg = s.number("angle_deg");
  return t;
}

void parse_scene(const json& j, RunConfig& cfg) {
  const Section s(j, "scene", {"range_bins", "rx", "snr_db", "window", "targets", "array"});
  Scene& scene = cfg.scene;
  scene.range_bins = int(s.integer("range_bins", 16));
  require(scene.range_bins >= 1, "scene.range_bins", "must be positive");
  scene.rx_count = int(s.integer("rx", 4));
  require(scene.rx_count >= 1, "scene.rx", "must be positive");
  if (s.has("snr_db")) scene.snr_db = s.number("snr_db");
  try {
    cfg.window = window_from_string(s.text("window", "rect"));
  } catch (const std::invalid_argument&) {
    throw ConfigError("'scene.window' must be \"rect\" or \"hann\"");
  }
  if (s.has("targets")) {
    const json& targets = s.array("targets");
    for (std::size_t k = 0; k < targets.size(); ++k)
      scene.targets.push_back(
          parse_target(targets[k], "scene.targets[" + std::to_string(k) + "]", scene, cfg.code.ramps()));
  }
  if (s.has("array")) {
    const Section a(s.raw("array"), "scene.array", {"tx", "rx"});
    ArrayGeometry g{a.numbers("tx"), a.numbers("rx")};
    require(g.tx_positions.size() == cfg.code.size(), "scene.array.tx", "must have one position per Tx");
    require(int(g.rx_positions.size()) == scene.rx_count, "scene.array.rx", "must have one position per Rx");
    scene.array = std::move(g);
  }
}

void parse_errors(const json& j, RunConfig& cfg) {
  if (!j.is_array()) throw ConfigError("'errors' must be an array");
  require(j.size() <= cfg.code.size(), "errors", "has more entries than Txs");
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string path = "errors[" + std::to_string(k) + "]";
    const Section s(j[k], path, {"deg", "max_deg", "seed"});
    PhaseErrorSpec spec;
    if (s.has("deg")) {
      require(!s.has("max_deg") && !s.has("seed"), path, "takes either 'deg' or 'max_deg'/'seed'");
      spec.degrees = s.numbers("deg");
    } else {
      spec.max_deg = s.number("max_deg", 10.0);
      require(spec.max_deg >= 0.0, path + ".max_deg", "must be non-negative");
      const auto seed = s.integer("seed", std::int64_t(k));
      require(seed >= 0, path + ".seed", "must be non-negative");
      spec.seed = std::uint64_t(seed);
    }
    cfg.errors.push_back(spec);
  }
}

void parse_calibration(const json& j, RunConfig& cfg) {
  const Section s(j, "calibration",
                  {"tx_of_interest", "max_frames", "threshold_db", "damping", "quantization_bits", "barycenter",
                   "leakage_compensation", "run_all_frames", "guard_bins", "detection_threshold_db"});
  CalibrationSettings& c = cfg.calibration;
  const auto tx = s.integer("tx_of_interest", 0);
  require(tx >= 0 && std::size_t(tx) < cfg.code.size(), "calibration.tx_of_interest", "must name a configured Tx");
  c.tx_of_interest = std::size_t(tx);
  c.max_frames = int(s.integer("max_frames", 20));
  require(c.max_frames >= 1, "calibration.max_frames", "must be positive");
  c.threshold_db = s.number("threshold_db", 6.0);
  c.damping = s.number("damping", 1.0);
  require(c.damping > 0.0 && c.damping <= 2.0, "calibration.damping", "must be in (0, 2]");
  c.quantization_bits = int(s.integer("quantization_bits", 0));
  require(c.quantization_bits >= 0 && c.quantization_bits <= 30, "calibration.quantization_bits",
          "must be in [0, 30]");
  const std::string mode = s.text("barycenter", "auto");
  if (mode != "auto") {
    try {
      c.barycenter = barycenter_mode_from_string(mode);
    } catch (const std::invalid_argument&) {
      throw ConfigError("'calibration.barycenter' must be auto, zero, mean or symmetric");
    }
  }
  c.leakage_compensation = s.boolean("leakage_compensation", true);
  c.run_all_frames = s.boolean("run_all_frames", false);
  c.guard_bins = int(s.integer("guard_bins", 2));
  require(c.guard_bins >= 0, "calibration.guard_bins", "must be non-negative");
  c.detection_threshold_db = s.number("detection_threshold_db", 12.0);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  const Section top(j, "", {"code", "scene", "errors", "calibration", "seed", "output"});
  RunConfig cfg;
  cfg.code = parse_code(top.raw("code"), cfg.warnings);
  if (top.has("scene")) parse_scene(top.raw("scene"), cfg);
  if (top.has("errors")) parse_errors(top.raw("errors"), cfg);
  if (top.has("calibration")) parse_calibration(top.raw("calibration"), cfg);
  if (top.has("seed")) {
    const json& seed = top.raw("seed");
    if (!seed.is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
    cfg.seed = seed.get<std::uint64_t>();
  }
  if (top.has("output")) {
    const Section o(top.raw("output"), "output", {"directory"});
    cfg.output_dir = o.text("directory", "out");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) {
  json code{{"M", cfg.code.ramps()}, {"tx", json::array()}};
  for (const auto& c : cfg.code.codes()) code["tx"].push_back({{"L", c.order()}, {"p", c.factor()}});

  json targets = json::array();
  for (const auto& t : cfg.scene.targets) {
    json jt{{"range_bin", t.range_bin},
            {"doppler_bin", t.doppler_bin},
            {"amplitude", t.amplitude},
            {"phase_rad", t.initial_phase}};
    if (t.angle_deg) jt["angle_deg"] = *t.angle_deg;
    targets.push_back(jt);
  }
  json scene{{"range_bins", cfg.scene.range_bins},
             {"rx", cfg.scene.rx_count},
             {"snr_db", cfg.scene.snr_db ? json(*cfg.scene.snr_db) : json(nullptr)},
             {"window", to_string(cfg.window)},
             {"targets", targets}};
  if (cfg.scene.array) scene["array"] = {{"tx", cfg.scene.array->tx_positions}, {"rx", cfg.scene.array->rx_positions}};

  json errors = json::array();
  for (const auto& e : cfg.errors) {
    if (e.degrees)
      errors.push_back({{"deg", *e.degrees}});
    else
      errors.push_back({{"max_deg", e.max_deg}, {"seed", e.seed}});
  }

  const CalibrationSettings& c = cfg.calibration;
  json cal{{"tx_of_interest", c.tx_of_interest},
           {"max_frames", c.max_frames},
           {"threshold_db", c.threshold_db},
           {"damping", c.damping},
           {"quantization_bits", c.quantization_bits},
           {"barycenter", c.barycenter ? to_string(*c.barycenter) : std::string("auto")},
           {"leakage_compensation", c.leakage_compensation},
           {"run_all_frames", c.run_all_frames},
           {"guard_bins", c.guard_bins},
           {"detection_threshold_db", c.detection_threshold_db}};

  json out{{"code", code},   {"scene", scene}, {"errors", errors},
           {"calibration", cal}, {"seed", cfg.seed}, {"output", {{"directory", cfg.output_dir}}}};
  return out.dump(2) + "\n";
}

CalibrationConfig calibration_config(const RunConfig& cfg) {
  CalibrationConfig c;
  c.operational = cfg.code;
  c.tx_of_interest = cfg.calibration.tx_of_interest;
  c.scene = cfg.scene;
  c.window = cfg.window;
  c.errors = cfg.errors;
  c.seed = cfg.seed;
  c.max_frames = cfg.calibration.max_frames;
  c.threshold_db = cfg.calibration.threshold_db;
  c.damping = cfg.calibration.damping;
  c.quantization_bits = cfg.calibration.quantization_bits;
  c.barycenter = cfg.calibration.barycenter;
  c.leakage_compensation = cfg.calibration.leakage_compensation;
  c.run_all_frames = cfg.calibration.run_all_frames;
  c.guard_bins = cfg.calibration.guard_bins;
  c.detection_threshold_db = cfg.calibration.detection_threshold_db;
  return c;
}

}  // namespace oddm
