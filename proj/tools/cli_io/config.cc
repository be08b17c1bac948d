// Copyright 2026 The Homodyne Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "homodyne/error.h"

namespace homodyne::cli {
namespace {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

using FieldRef = std::variant<double*, int*, std::uint64_t*, bool*, std::string*,
                              std::vector<double>*, std::optional<std::uint64_t>*>;

struct Field {
  const char* section;
  const char* key;
  FieldRef ref;
  bool is_path = false;
};

std::vector<Field> fields(ExperimentConfig& c) {
  auto& d = c.detector;
  auto& q = c.squeezer;
  auto& s = c.simulation;
  auto& t = c.tomography;
  auto& f = c.fit;
  auto& l = c.lock;
  auto& i = c.inputs;
  return {
      {"run", "seed", &c.seed},
      {"detector", "f3db_hz", &d.f3db_hz},
      {"detector", "butterworth_order", &d.butterworth_order},
      {"detector", "max_clearance_db", &d.max_clearance_db},
      {"detector", "clearance_cutoff_hz", &d.clearance_cutoff_hz},
      {"detector", "eta_det", &d.eta_det},
      {"detector", "electronic_noise_dbm", &d.electronic_noise_dbm},
      {"detector", "saturation_power_mw", &d.saturation_power_mw},
      {"detector", "reference_lo_power_mw", &d.reference_lo_power_mw},
      {"detector", "rbw_hz", &d.rbw_hz},
      {"detector", "transimpedance_ohm", &d.transimpedance_ohm},
      {"detector", "responsivity_a_a_per_w", &d.responsivity_a_a_per_w},
      {"detector", "responsivity_b_a_per_w", &d.responsivity_b_a_per_w},
      {"squeezer", "mu_per_sqrt_mw", &q.mu_per_sqrt_mw},
      {"squeezer", "p_shg_mw", &q.p_shg_mw},
      {"squeezer", "eta_total", &q.eta_total},
      {"simulation", "freq_start_hz", &s.freq_start_hz},
      {"simulation", "freq_stop_hz", &s.freq_stop_hz},
      {"simulation", "freq_points", &s.freq_points},
      {"simulation", "trace_noise", &s.trace_noise},
      {"simulation", "lo_power_mw", &s.lo_power_mw},
      {"simulation", "linearity_points", &s.linearity_points},
      {"simulation", "linearity_min_mw", &s.linearity_min_mw},
      {"simulation", "linearity_max_mw", &s.linearity_max_mw},
      {"simulation", "saturated_points", &s.saturated_points},
      {"simulation", "linearity_noise", &s.linearity_noise},
      {"simulation", "pump_powers_mw", &s.pump_powers_mw},
      {"simulation", "variance_noise", &s.variance_noise},
      {"simulation", "samples", &s.samples},
      {"simulation", "scan_drive_hz", &s.scan_drive_hz},
      {"simulation", "scan_v_low", &s.scan_v_low},
      {"simulation", "scan_v_high", &s.scan_v_high},
      {"simulation", "sample_rate_hz", &s.sample_rate_hz},
      {"simulation", "true_offset_rad", &s.true_offset_rad},
      {"simulation", "true_rad_per_volt", &s.true_rad_per_volt},
      {"tomography", "cutoff", &t.cutoff},
      {"tomography", "n_phases", &t.n_phases},
      {"tomography", "n_inner_bins", &t.n_inner_bins},
      {"tomography", "tolerance", &t.tolerance},
      {"tomography", "max_iterations", &t.max_iterations},
      {"tomography", "wigner_points", &t.wigner_points},
      {"tomography", "calibration", &t.calibration},
      {"tomography", "offset_rad", &t.offset_rad},
      {"tomography", "rad_per_volt", &t.rad_per_volt},
      {"fit", "space", &f.space},
      {"fit", "branches", &f.branches},
      {"fit", "relative_weights", &f.relative_weights},
      {"fit", "band_lo_hz", &f.band_lo_hz},
      {"fit", "band_hi_hz", &f.band_hi_hz},
      {"lock", "kp", &l.kp},
      {"lock", "ki", &l.ki},
      {"lock", "kd", &l.kd},
      {"lock", "crosstalk", &l.crosstalk},
      {"lock", "steps", &l.steps},
      {"lock", "lo_phase_span_rad", &l.lo_phase_span_rad},
      {"inputs", "shot_trace", &i.shot_trace, true},
      {"inputs", "dark_trace", &i.dark_trace, true},
      {"inputs", "squeezed_trace", &i.squeezed_trace, true},
      {"inputs", "linearity", &i.linearity, true},
      {"inputs", "variances", &i.variances, true},
      {"inputs", "samples", &i.samples, true},
      {"inputs", "scan", &i.scan, true},
  };
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void bad_value(const Field& f, const std::string& text) {
  throw Error(ErrorKind::kParseError, std::string("config ") + f.section + "." + f.key +
                                          ": cannot parse '" + text + "'");
}

double to_double(const Field& f, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || !std::isfinite(v)) bad_value(f, text);
  return v;
}

template <typename T>
T to_integer(const Field& f, const std::string& text) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) bad_value(f, text);
  return v;
}

struct Assign {
  const Field& field;
  const std::string& text;
  const fs::path& base_dir;

  void operator()(double* p) const { *p = to_double(field, text); }
  void operator()(int* p) const { *p = to_integer<int>(field, text); }
  void operator()(std::uint64_t* p) const { *p = to_integer<std::uint64_t>(field, text); }
  void operator()(bool* p) const {
    if (text == "true" || text == "1") {
      *p = true;
    } else if (text == "false" || text == "0") {
      *p = false;
    } else {
      bad_value(field, text);
    }
  }
  void operator()(std::string* p) const {
    if (field.is_path && !text.empty()) {
      const fs::path path(text);
      *p = (path.is_relative() && !base_dir.empty() ? base_dir / path : path)
               .lexically_normal()
               .string();
    } else {
      *p = text;
    }
  }
  void operator()(std::vector<double>* p) const {
    p->clear();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto first = item.find_first_not_of(' ');
      const auto last = item.find_last_not_of(' ');
      if (first == std::string::npos) bad_value(field, text);
      p->push_back(to_double(field, item.substr(first, last - first + 1)));
    }
  }
  void operator()(std::optional<std::uint64_t>* p) const {
    *p = to_integer<std::uint64_t>(field, text);
  }
};

struct Render {
  std::string operator()(double* p) const { return format_double(*p); }
  std::string operator()(int* p) const { return std::to_string(*p); }
  std::string operator()(std::uint64_t* p) const { return std::to_string(*p); }
  std::string operator()(bool* p) const { return *p ? "true" : "false"; }
  std::string operator()(std::string* p) const { return *p; }
  std::string operator()(std::vector<double>* p) const {
    std::string out;
    for (std::size_t i = 0; i < p->size(); ++i) {
      if (i) out += ", ";
      out += format_double((*p)[i]);
    }
    return out;
  }
  std::string operator()(std::optional<std::uint64_t>* p) const {
    return *p ? std::to_string(**p) : std::string();
  }
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kInvalidArgument, "config: " + what);
}

}  // namespace

DetectorSpec ExperimentConfig::detector_spec() const {
  DetectorSpec spec;
  spec.f3db_hz = detector.f3db_hz;
  spec.butterworth_order = detector.butterworth_order;
  spec.max_clearance_db = detector.max_clearance_db;
  spec.clearance_cutoff_hz = detector.clearance_cutoff_hz;
  spec.eta_det = detector.eta_det;
  spec.electronic_noise_dbm = detector.electronic_noise_dbm;
  spec.saturation_power_mw = detector.saturation_power_mw;
  spec.reference_lo_power_mw = detector.reference_lo_power_mw;
  spec.rbw_hz = detector.rbw_hz;
  spec.transimpedance_ohm = detector.transimpedance_ohm;
  spec.responsivity_a_per_w = detector.responsivity_a_a_per_w;
  return spec;
}

SqueezerSpec ExperimentConfig::squeezer_spec() const {
  SqueezerSpec spec;
  spec.mu = squeezer.mu_per_sqrt_mw;
  spec.p_shg_mw = squeezer.p_shg_mw;
  spec.source_losses = pre_detector_budget();
  return spec;
}

Eq1FitOptions ExperimentConfig::fit_options() const {
  Eq1FitOptions opts;
  opts.space = fit.space == "db" ? FitSpace::kDecibel : FitSpace::kLinear;
  opts.branches = fit.branches == "separate" ? FitBranches::kSeparate : FitBranches::kJoint;
  opts.relative_weights = fit.relative_weights;
  return opts;
}

ScanReconstructionOptions ExperimentConfig::reconstruction_options() const {
  ScanReconstructionOptions opts;
  opts.cutoff = tomography.cutoff;
  opts.n_phases = tomography.n_phases;
  opts.n_inner_bins = tomography.n_inner_bins;
  opts.wigner_points = tomography.wigner_points;
  opts.mle.tolerance = tomography.tolerance;
  opts.mle.max_iterations = tomography.max_iterations;
  if (seed) opts.mle.seed = *seed;
  return opts;
}

ScanSettings ExperimentConfig::scan_settings() const {
  return {.drive_hz = simulation.scan_drive_hz,
          .v_low = simulation.scan_v_low,
          .v_high = simulation.scan_v_high,
          .sample_rate_hz = simulation.sample_rate_hz};
}

PidGains ExperimentConfig::pid_gains() const { return {lock.kp, lock.ki, lock.kd}; }

ExperimentConfig parse_config(std::string_view text, const fs::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::kParseError,
                "config line " + std::to_string(e.line()) + ": " + e.message());
  }
  ExperimentConfig config;
  const auto table = fields(config);
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) {
      throw Error(ErrorKind::kParseError, "config key '" + section + "' outside a section");
    }
    for (const auto& [key, value] : entries) {
      const Field* match = nullptr;
      for (const auto& f : table) {
        if (section == f.section && key == f.key) match = &f;
      }
      if (!match) {
        throw Error(ErrorKind::kParseError, "config: unknown key " + section + "." + key);
      }
      const std::string raw = value.get_value<std::string>();
      if (raw.empty() && !std::holds_alternative<std::string*>(match->ref)) {
        bad_value(*match, raw);
      }
      std::visit(Assign{*match, raw, base_dir}, match->ref);
    }
  }
  return config;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kMissingInput, "config file not found: " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto config = parse_config(buffer.str(), path.parent_path());
  for (const auto& f : fields(config)) {
    if (!f.is_path) continue;
    const auto& file = *std::get<std::string*>(f.ref);
    if (!file.empty() && !fs::is_regular_file(file)) {
      throw Error(ErrorKind::kMissingInput, std::string("config ") + f.section + "." + f.key +
                                                ": file not found: " + file);
    }
  }
  return config;
}

std::string config_to_ini(const ExperimentConfig& config) {
  ExperimentConfig copy = config;
  std::string out;
  std::string current;
  for (const auto& f : fields(copy)) {
    if (current != f.section) {
      if (!current.empty()) out += "\n";
      out += "[" + std::string(f.section) + "]\n";
      current = f.section;
    }
    const std::string value = std::visit(Render{}, f.ref);
    if (value.empty()) continue;
    out += std::string(f.key) + " = " + value + "\n";
  }
  return out;
}

void validate(const ExperimentConfig& c) {
  if (!c.seed) {
    throw Error(ErrorKind::kInvalidArgument,
                "no seed: set [run] seed in the config or pass --seed");
  }
  c.detector_spec().validate();
  require(c.squeezer.mu_per_sqrt_mw >= 0.0, "squeezer.mu_per_sqrt_mw must be >= 0");
  require(c.squeezer.p_shg_mw >= 0.0, "squeezer.p_shg_mw must be >= 0");
  require(c.squeezer.eta_total > 0.0 && c.squeezer.eta_total <= 1.0,
          "squeezer.eta_total must lie in (0, 1]");
  const auto& s = c.simulation;
  require(s.freq_stop_hz > s.freq_start_hz, "simulation.freq_stop_hz must exceed freq_start_hz");
  require(s.freq_points >= 2, "simulation.freq_points must be >= 2");
  require(s.trace_noise >= 0.0 && s.variance_noise >= 0.0 && s.linearity_noise >= 0.0,
          "simulation noise levels must be >= 0");
  require(s.linearity_points >= 4, "simulation.linearity_points must be >= 4");
  require(s.linearity_min_mw > 0.0 && s.linearity_max_mw > s.linearity_min_mw,
          "simulation linearity power range is empty");
  require(s.saturated_points >= 0 && s.saturated_points < s.linearity_points,
          "simulation.saturated_points out of range");
  require(!s.pump_powers_mw.empty(), "simulation.pump_powers_mw is empty");
  require(s.samples >= 1, "simulation.samples must be >= 1");
  require(s.sample_rate_hz > 0.0 && s.scan_drive_hz > 0.0,
          "simulation scan rates must be > 0");
  const auto& t = c.tomography;
  require(t.cutoff >= 2, "tomography.cutoff must be >= 2");
  require(t.n_phases >= 1 && t.n_inner_bins >= 1 && t.wigner_points >= 3,
          "tomography grid sizes too small");
  require(t.tolerance > 0.0 && t.max_iterations >= 1, "tomography stop criteria invalid");
  require(t.calibration == "fit" || t.calibration == "fixed",
          "tomography.calibration must be 'fit' or 'fixed'");
  require(c.fit.space == "linear" || c.fit.space == "db", "fit.space must be 'linear' or 'db'");
  require(c.fit.branches == "joint" || c.fit.branches == "separate",
          "fit.branches must be 'joint' or 'separate'");
  require(c.fit.band_hi_hz > c.fit.band_lo_hz, "fit band is empty");
  require(c.lock.steps >= 1, "lock.steps must be >= 1");
  require(c.lock.crosstalk >= 0.0 && c.lock.crosstalk <= 0.05,
          "lock.crosstalk must lie in [0, 0.05]");
}

}  // namespace homodyne::cli
