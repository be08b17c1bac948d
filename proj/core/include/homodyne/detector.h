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

#ifndef HOMODYNE_DETECTOR_H_
#define HOMODYNE_DETECTOR_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homodyne/noise_trace.h"

namespace homodyne {

// ---------------------------------------------------------------------------
// Loss budget

struct LossStage {
  std::string label;
  double transmissivity = 1.0;
};

class LossBudget {
 public:
  LossBudget() = default;
  // Throws kInvalidArgument for transmissivities outside [0, 1].
  explicit LossBudget(std::vector<LossStage> stages);

  const std::vector<LossStage>& stages() const { return stages_; }
  bool empty() const { return stages_.empty(); }
  LossBudget concatenated(const LossBudget& tail) const;

 private:
  std::vector<LossStage> stages_;
};

struct BudgetProduct {
  double total = 1.0;
  std::vector<double> cumulative;  // running product after each stage
};

// Throws kInvalidArgument on an empty budget.
BudgetProduct budget_product(const LossBudget& budget);

// Squeezer-to-detector chain of the integrated homodyne experiment:
// waveguide, module-to-fibre coupling, fibre components, grating coupler,
// photodiode efficiency, electronic-noise clearance.
LossBudget squeezing_experiment_budget();
// Optical stages ahead of the photodiodes (first four).
LossBudget pre_detector_budget();
// Last three stages only: the detector seen as a fibre-coupled module.
LossBudget fibre_module_budget();

// Efficiency equivalent of a shot-noise clearance C (dB): the fraction of
// the illuminated noise power that is vacuum noise, 1 - 10^(-C/10).
double clearance_to_efficiency(double clearance_db);

// ---------------------------------------------------------------------------
// Detector description

// Piecewise-linear function of frequency, clamped at the ends.
struct Spectrum {
  std::vector<double> freq_hz;
  std::vector<double> values;
  bool empty() const { return freq_hz.empty(); }
  double at(double f) const;
};

// |H(f)|^2 of an order-n Butterworth low-pass: 1 / (1 + (f/fc)^(2n)).
double butterworth_power_response(double f_hz, double f3db_hz, int order);

struct DetectorSpec {
  double f3db_hz = 1.7e9;
  int butterworth_order = 2;
  // Low-frequency clearance at the reference LO power; the clearance
  // spectrum follows the Butterworth roll-off of the shot-noise excess and
  // is zero at and above `clearance_cutoff_hz`.
  double max_clearance_db = 14.0;
  double clearance_cutoff_hz = 9.2e9;
  // Optional tabulated clearance (dB); overrides the two fields above.
  Spectrum clearance_table_db;
  double eta_det = 0.88;
  double electronic_noise_dbm = -75.0;
  Spectrum electronic_noise_table_dbm;  // optional override
  double saturation_power_mw = 50.0;
  double reference_lo_power_mw = 4.36;
  double rbw_hz = 8.0e6;
  // Unused by the signal model; kept for reports.
  double transimpedance_ohm = 3300.0;
  double responsivity_a_per_w = 1.1;

  double clearance_db(double f_hz) const;
  double electronic_noise_dbm_at(double f_hz) const;
  void validate() const;
};

// Output PSD = electronic noise + S_ref(f) g(P) V_det(f), where S_ref is the
// shot-noise excess that reproduces clearance_db(f) at the reference LO
// power, g(P) = [P/(1+P/P_sat)] / [P_ref/(1+P_ref/P_sat)] is the soft
// saturation knee, and V_det = eta_det V_in + 1 - eta_det is the input
// variance (shot-noise units) after the detector's own loss.
NoiseTrace simulate_output_spectrum(const DetectorSpec& spec, double lo_power_mw,
                                    std::span<const double> freq_hz,
                                    const std::function<double(double)>& input_variance);

// Uniform frequency grid [start, stop] with `points` samples.
std::vector<double> linear_grid(double start, double stop, int points);

// ---------------------------------------------------------------------------
// Characterisation fits

struct ButterworthFitOptions {
  std::optional<int> order;  // fixed order; otherwise n = 1..max_order by AIC
  int max_order = 6;
  int max_iterations = 100;
};

struct ButterworthFit {
  double f3db_hz = 0.0;
  int order = 0;
  double gain_mw = 0.0;        // low-frequency shot-noise excess
  double weighted_rss = 0.0;
  double aic = 0.0;
  std::vector<double> aic_by_order;  // index n-1; NaN where not fitted
  std::size_t points_used = 0;
};

// Least-squares fit of the dark-subtracted linear spectrum to
// G / (1 + (f/fc)^(2n)) over points where shot exceeds dark. Residuals are
// weighted by the combined trace level so relative errors count equally.
// Throws kGridMismatch, kInsufficientPoints, or kFitDiverged (no
// convergence, or a 3-dB point beyond the measured range).
ButterworthFit fit_butterworth(const NoiseTrace& shot, const NoiseTrace& dark,
                               const ButterworthFitOptions& options = {});

struct LinearityFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;  // log10 variance at 1 mW
  std::vector<bool> saturated;
  std::size_t points_used = 0;
};

// Fits log10(V - V_dark) against log10(P). Starting from the lower half of
// the power sweep, points are admitted in order of increasing power while
// their predicted residual stays within 3 sigma of the current fit; the
// first point that fails and everything above it are flagged as saturated.
// Requires powers sorted ascending. Throws kInsufficientPoints if fewer than
// four points remain.
LinearityFit linearity_fit(std::span<const double> lo_powers_mw,
                           std::span<const double> variances, double dark_variance);

// ---------------------------------------------------------------------------
// MZI balance, CMRR and lock

// Reflectivity of the MZI at effective phase phi: (1 - cos(phi + pi/2)) / 2,
// so phi = 0 is the balanced point.
double mzi_reflectivity(double phi_effective);

struct MziState {
  double phi_mzi = 0.0;
  double phi_lo = 0.0;
  double crosstalk = 0.009;  // LO-heater phase leaking into the MZI

  double effective_phase() const { return phi_mzi + crosstalk * phi_lo; }
  double reflectivity() const { return mzi_reflectivity(effective_phase()); }
  void validate() const;
};

inline constexpr double kDefaultCmrrCeilingDb = 52.0;

// Common-mode rejection for an amplitude-modulated LO with modulation depth
// `tone_depth`: 20 log10(s/d) with s = R1 t + R2 (1-t), d = |R1 t - R2 (1-t)|
// and t the MZI reflectivity, capped at `ceiling_db`.
double cmrr_db(const MziState& mzi, double r1_a_per_w, double r2_a_per_w,
               double tone_depth = 0.1, double ceiling_db = kDefaultCmrrCeilingDb);

struct PidGains {
  double kp = 0.5;
  double ki = 0.2;
  double kd = 0.0;
};

struct PidLockResult {
  std::vector<double> reflectivity;  // measured each step
  std::vector<double> phi_mzi;       // actuator setting each step
  bool locked = false;
  bool oscillating = false;
  double control_effort = 0.0;  // sum |delta phi_mzi|
};

inline constexpr double kLockTolerance = 1e-3;

// Discrete-time PID with unit timestep and derivative on measurement. At
// step k the LO heater sits at lo_phase[k], the loop reads the reflectivity
// and updates phi_mzi for the next step. `locked` means |R - setpoint| <
// 1e-3 over the final 10% of steps; `oscillating` means the reflectivity
// swings by more than 0.1 peak-to-peak over that window.
PidLockResult pid_lock_mzi(const MziState& initial, std::span<const double> lo_phase,
                           const PidGains& gains, double setpoint = 0.5);

}  // namespace homodyne

#endif  // HOMODYNE_DETECTOR_H_
