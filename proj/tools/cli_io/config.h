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

#ifndef HOMODYNE_TOOLS_CONFIG_H_
#define HOMODYNE_TOOLS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "homodyne/detector.h"
#include "homodyne/squeezing.h"
#include "homodyne/tomography.h"

namespace homodyne::cli {

struct DetectorSection {
  double f3db_hz = 1.7e9;
  int butterworth_order = 2;
  double max_clearance_db = 14.0;
  double clearance_cutoff_hz = 9.2e9;
  double eta_det = 0.88;
  double electronic_noise_dbm = -75.0;
  double saturation_power_mw = 50.0;
  double reference_lo_power_mw = 4.36;
  double rbw_hz = 8.0e6;
  double transimpedance_ohm = 3300.0;
  double responsivity_a_a_per_w = 1.1;
  double responsivity_b_a_per_w = 1.089;

  bool operator==(const DetectorSection&) const = default;
};

struct SqueezerSection {
  double mu_per_sqrt_mw = 0.044;
  double p_shg_mw = 72.7;
  double eta_total = 0.28;  // used when synthesising detected data

  bool operator==(const SqueezerSection&) const = default;
};

struct SimulationSection {
  double freq_start_hz = 1.0e7;
  double freq_stop_hz = 1.0e10;
  int freq_points = 1000;
  double trace_noise = 0.01;  // relative, per point
  double lo_power_mw = 4.36;
  int linearity_points = 20;
  double linearity_min_mw = 0.1;
  double linearity_max_mw = 10.0;
  int saturated_points = 5;
  double linearity_noise = 0.002;
  std::vector<double> pump_powers_mw = {5, 10, 20, 30, 40, 50, 60, 72.7};
  double variance_noise = 0.01;
  std::uint64_t samples = 1000000;
  double scan_drive_hz = 100.0;
  double scan_v_low = 0.0;
  double scan_v_high = 2.0;
  double sample_rate_hz = 1.0e6;
  double true_offset_rad = 0.0;
  double true_rad_per_volt = 2.0;

  bool operator==(const SimulationSection&) const = default;
};

struct TomographySection {
  int cutoff = 6;
  int n_phases = 60;
  int n_inner_bins = 101;
  double tolerance = 1e-7;
  int max_iterations = 2000;
  int wigner_points = 201;
  std::string calibration = "fit";  // "fit" or "fixed"
  double offset_rad = 0.0;
  double rad_per_volt = 2.0;

  bool operator==(const TomographySection&) const = default;
};

struct FitSection {
  std::string space = "linear";    // "linear" or "db"
  std::string branches = "joint";  // "joint" or "separate"
  bool relative_weights = true;
  double band_lo_hz = 0.0;
  double band_hi_hz = 1.7e9;

  bool operator==(const FitSection&) const = default;
};

struct LockSection {
  double kp = 0.5;
  double ki = 0.2;
  double kd = 0.0;
  double crosstalk = 0.009;
  int steps = 10000;
  double lo_phase_span_rad = 62.83185307179586;  // 10 fringes

  bool operator==(const LockSection&) const = default;
};

// Input files; an empty path means the data are synthesised.
struct InputsSection {
  std::string shot_trace;
  std::string dark_trace;
  std::string squeezed_trace;
  std::string linearity;
  std::string variances;
  std::string samples;
  std::string scan;

  bool operator==(const InputsSection&) const = default;
};

struct ExperimentConfig {
  std::optional<std::uint64_t> seed;
  DetectorSection detector;
  SqueezerSection squeezer;
  SimulationSection simulation;
  TomographySection tomography;
  FitSection fit;
  LockSection lock;
  InputsSection inputs;

  bool operator==(const ExperimentConfig&) const = default;

  DetectorSpec detector_spec() const;
  SqueezerSpec squeezer_spec() const;
  Eq1FitOptions fit_options() const;
  ScanReconstructionOptions reconstruction_options() const;
  ScanSettings scan_settings() const;
  PidGains pid_gains() const;
};

// Parses INI text. Unknown sections or keys and malformed values raise
// kParseError. Relative input paths are resolved against `base_dir`.
ExperimentConfig parse_config(std::string_view text,
                              const std::filesystem::path& base_dir = {});

// Reads and parses a file, then checks that every input file exists
// (kMissingInput otherwise).
ExperimentConfig load_config(const std::filesystem::path& path);

// INI text with every key written explicitly; doubles use 17 significant
// digits so parse_config(config_to_ini(c)) == c.
std::string config_to_ini(const ExperimentConfig& config);

// Checks ranges and that a seed is present.
void validate(const ExperimentConfig& config);

}  // namespace homodyne::cli

#endif  // HOMODYNE_TOOLS_CONFIG_H_
