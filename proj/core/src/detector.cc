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

#include "homodyne/detector.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "homodyne/error.h"
#include "least_squares.h"

namespace homodyne {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LineFit {
  double intercept = 0.0, slope = 0.0, rss = 0.0, x_mean = 0.0, sxx = 0.0;
  std::size_t n = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::size_t n) {
  LineFit f;
  f.n = n;
  double y_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f.x_mean += x[i];
    y_mean += y[i];
  }
  f.x_mean /= n;
  y_mean /= n;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f.sxx += (x[i] - f.x_mean) * (x[i] - f.x_mean);
    sxy += (x[i] - f.x_mean) * (y[i] - y_mean);
  }
  f.slope = sxy / f.sxx;
  f.intercept = y_mean - f.slope * f.x_mean;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.rss += r * r;
  }
  return f;
}

}  // namespace

LossBudget::LossBudget(std::vector<LossStage> stages) : stages_(std::move(stages)) {
  for (const auto& s : stages_) {
    if (!(s.transmissivity >= 0.0 && s.transmissivity <= 1.0)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "loss stage '" + s.label + "' transmissivity outside [0, 1]");
    }
  }
}

LossBudget LossBudget::concatenated(const LossBudget& tail) const {
  std::vector<LossStage> all = stages_;
  all.insert(all.end(), tail.stages_.begin(), tail.stages_.end());
  return LossBudget(std::move(all));
}

BudgetProduct budget_product(const LossBudget& budget) {
  if (budget.empty()) throw Error(ErrorKind::kInvalidArgument, "loss budget is empty");
  BudgetProduct out;
  for (const auto& s : budget.stages()) {
    out.total *= s.transmissivity;
    out.cumulative.push_back(out.total);
  }
  return out;
}

LossBudget squeezing_experiment_budget() {
  return LossBudget({{"ridge_waveguide", 0.83},
                     {"module_fibre_coupling", 0.80},
                     {"fibre_components", 0.85},
                     {"grating_coupler", 0.62},
                     {"photodiode_efficiency", 0.88},
                     {"shot_noise_clearance", 0.96}});
}

LossBudget pre_detector_budget() {
  const auto full = squeezing_experiment_budget();
  const auto& all = full.stages();
  return LossBudget(std::vector<LossStage>(all.begin(), all.begin() + 4));
}

LossBudget fibre_module_budget() {
  return LossBudget({{"grating_coupler", 0.62},
                     {"photodiode_efficiency", 0.88},
                     {"shot_noise_clearance", 0.96}});
}

double clearance_to_efficiency(double clearance_db) {
  if (!(clearance_db >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "clearance must be >= 0 dB");
  }
  if (std::isinf(clearance_db)) return 1.0;
  return 1.0 - std::pow(10.0, -clearance_db / 10.0);
}

double Spectrum::at(double f) const {
  if (freq_hz.empty()) throw Error(ErrorKind::kInvalidArgument, "empty spectrum table");
  if (f <= freq_hz.front()) return values.front();
  if (f >= freq_hz.back()) return values.back();
  const auto it = std::upper_bound(freq_hz.begin(), freq_hz.end(), f);
  const std::size_t hi = it - freq_hz.begin(), lo = hi - 1;
  const double w = (f - freq_hz[lo]) / (freq_hz[hi] - freq_hz[lo]);
  return values[lo] + w * (values[hi] - values[lo]);
}

double butterworth_power_response(double f_hz, double f3db_hz, int order) {
  return 1.0 / (1.0 + std::pow(f_hz / f3db_hz, 2.0 * order));
}

double DetectorSpec::clearance_db(double f_hz) const {
  if (!clearance_table_db.empty()) return clearance_table_db.at(f_hz);
  if (f_hz >= clearance_cutoff_hz) return 0.0;
  const double excess = (std::pow(10.0, max_clearance_db / 10.0) - 1.0) *
                        butterworth_power_response(f_hz, f3db_hz, butterworth_order);
  return 10.0 * std::log10(1.0 + excess);
}

double DetectorSpec::electronic_noise_dbm_at(double f_hz) const {
  if (!electronic_noise_table_dbm.empty()) return electronic_noise_table_dbm.at(f_hz);
  return electronic_noise_dbm;
}

void DetectorSpec::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::kInvalidArgument, "detector spec: " + what);
  };
  if (!(f3db_hz > 0.0)) fail("f3db_hz must be > 0");
  if (butterworth_order < 1) fail("butterworth_order must be >= 1");
  if (!(eta_det >= 0.0 && eta_det <= 1.0)) fail("eta_det must lie in [0, 1]");
  if (!(max_clearance_db >= 0.0)) fail("max_clearance_db must be >= 0");
  if (!(saturation_power_mw > 0.0)) fail("saturation_power_mw must be > 0");
  if (!(reference_lo_power_mw > 0.0)) fail("reference_lo_power_mw must be > 0");
  if (clearance_table_db.freq_hz.size() != clearance_table_db.values.size() ||
      electronic_noise_table_dbm.freq_hz.size() != electronic_noise_table_dbm.values.size()) {
    fail("tabulated spectra have mismatched lengths");
  }
}

NoiseTrace simulate_output_spectrum(const DetectorSpec& spec, double lo_power_mw,
                                    std::span<const double> freq_hz,
                                    const std::function<double(double)>& input_variance) {
  spec.validate();
  if (!(lo_power_mw >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "LO power must be >= 0");
  }
  auto knee = [&](double p) { return p / (1.0 + p / spec.saturation_power_mw); };
  const double gain = knee(lo_power_mw) / knee(spec.reference_lo_power_mw);

  NoiseTrace trace;
  trace.rbw_hz = spec.rbw_hz;
  trace.freq_hz.assign(freq_hz.begin(), freq_hz.end());
  trace.power_dbm.resize(freq_hz.size());
  for (std::size_t i = 0; i < freq_hz.size(); ++i) {
    const double f = freq_hz[i];
    const double noise_dbm = spec.electronic_noise_dbm_at(f);
    const double noise_mw = dbm_to_mw(noise_dbm);
    const double shot_ref = noise_mw * (std::pow(10.0, spec.clearance_db(f) / 10.0) - 1.0);
    const double v_det = spec.eta_det * input_variance(f) + (1.0 - spec.eta_det);
    const double signal = shot_ref * gain * v_det;
    trace.power_dbm[i] = signal == 0.0 ? noise_dbm : mw_to_dbm(noise_mw + signal);
  }
  trace.validate();
  return trace;
}

std::vector<double> linear_grid(double start, double stop, int points) {
  if (points < 2) throw Error(ErrorKind::kInvalidArgument, "grid needs >= 2 points");
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) out[i] = start + (stop - start) * i / (points - 1);
  return out;
}

ButterworthFit fit_butterworth(const NoiseTrace& shot, const NoiseTrace& dark,
                               const ButterworthFitOptions& options) {
  shot.validate();
  dark.validate();
  if (!same_grid(shot, dark)) {
    throw Error(ErrorKind::kGridMismatch, "shot and dark traces use different frequency grids");
  }
  std::vector<double> f, y, sigma;
  for (std::size_t i = 0; i < shot.size(); ++i) {
    const double s = dbm_to_mw(shot.power_dbm[i]);
    const double d = dbm_to_mw(dark.power_dbm[i]);
    if (s > d) {
      f.push_back(shot.freq_hz[i]);
      y.push_back(s - d);
      sigma.push_back(std::hypot(s, d));
    }
  }
  if (f.size() < 4) {
    throw Error(ErrorKind::kInsufficientPoints,
                "fewer than four frequencies with shot noise above the dark trace");
  }
  const std::size_t head = std::min<std::size_t>(5, y.size());
  double g0 = 0.0;
  for (std::size_t i = 0; i < head; ++i) g0 += y[i];
  g0 /= head;
  double f_half = kNaN;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0.5 * g0) {
      f_half = f[i];
      break;
    }
  }
  if (std::isnan(f_half)) {
    throw Error(ErrorKind::kFitDiverged,
                "spectrum never falls 3 dB below its low-frequency level; "
                "cut-off lies beyond the measured range");
  }

  const int lo = options.order.value_or(1);
  const int hi = options.order.value_or(options.max_order);
  if (lo < 1 || hi < lo) throw Error(ErrorKind::kInvalidArgument, "invalid Butterworth order");

  const int m = static_cast<int>(f.size());
  ButterworthFit best;
  best.aic = std::numeric_limits<double>::infinity();
  best.aic_by_order.assign(hi, kNaN);
  for (int n = lo; n <= hi; ++n) {
    internal::LeastSquaresProblem problem;
    problem.n_params = 2;
    problem.n_residuals = m;
    problem.residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
      const double g = std::exp(x(0)), fc = std::exp(x(1));
      for (int j = 0; j < m; ++j) {
        r(j) = (g * butterworth_power_response(f[j], fc, n) - y[j]) / sigma[j];
      }
    };
    problem.jacobian = [&](const Eigen::VectorXd& x, Eigen::MatrixXd& jac) {
      const double g = std::exp(x(0)), fc = std::exp(x(1));
      for (int j = 0; j < m; ++j) {
        const double u = std::pow(f[j] / fc, 2.0 * n);
        const double h = 1.0 / (1.0 + u);
        jac(j, 0) = g * h / sigma[j];
        jac(j, 1) = g * 2.0 * n * u * h * h / sigma[j];
      }
    };
    Eigen::VectorXd x0(2);
    x0 << std::log(g0), std::log(f_half);
    const auto result =
        internal::solve_least_squares(problem, x0, options.max_iterations);
    if (!result.converged) continue;
    const double aic = m * std::log(std::max(result.rss, 1e-300) / m) + 2.0 * 3.0;
    best.aic_by_order[n - 1] = aic;
    if (aic < best.aic) {
      best.aic = aic;
      best.order = n;
      best.gain_mw = std::exp(result.x(0));
      best.f3db_hz = std::exp(result.x(1));
      best.weighted_rss = result.rss;
    }
  }
  if (best.order == 0) {
    throw Error(ErrorKind::kFitDiverged, "Butterworth fit did not converge for any order");
  }
  if (best.f3db_hz > shot.freq_hz.back()) {
    throw Error(ErrorKind::kFitDiverged, "fitted 3-dB point lies beyond the measured range");
  }
  best.points_used = f.size();
  return best;
}

LinearityFit linearity_fit(std::span<const double> lo_powers_mw,
                           std::span<const double> variances, double dark_variance) {
  const std::size_t n = lo_powers_mw.size();
  if (variances.size() != n) {
    throw Error(ErrorKind::kInvalidArgument, "power and variance arrays differ in length");
  }
  if (n < 4) throw Error(ErrorKind::kInsufficientPoints, "need at least four LO powers");
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lo_powers_mw[i] > 0.0) || (i > 0 && !(lo_powers_mw[i] > lo_powers_mw[i - 1]))) {
      throw Error(ErrorKind::kInvalidArgument, "LO powers must be positive and increasing");
    }
    const double excess = variances[i] - dark_variance;
    if (!(excess > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "variance at or below the dark level at point " + std::to_string(i));
    }
    x[i] = std::log10(lo_powers_mw[i]);
    y[i] = std::log10(excess);
  }

  constexpr double kSigmaFloor = 1e-6;
  std::size_t used = std::max<std::size_t>(4, (n + 1) / 2);
  LineFit fit = fit_line(x, y, used);
  while (used < n) {
    const double sigma =
        std::max(kSigmaFloor, used > 2 ? std::sqrt(fit.rss / (used - 2)) : 0.0);
    const double dx = x[used] - fit.x_mean;
    const double pred_sigma = sigma * std::sqrt(1.0 + 1.0 / used + dx * dx / fit.sxx);
    const double residual = y[used] - (fit.intercept + fit.slope * x[used]);
    if (std::abs(residual) > 3.0 * pred_sigma) break;
    ++used;
    fit = fit_line(x, y, used);
  }

  LinearityFit out;
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.slope_stderr = used > 2 ? std::sqrt(fit.rss / (used - 2) / fit.sxx) : kNaN;
  out.points_used = used;
  out.saturated.assign(n, false);
  for (std::size_t i = used; i < n; ++i) out.saturated[i] = true;
  return out;
}

double mzi_reflectivity(double phi_effective) {
  return 0.5 * (1.0 - std::cos(phi_effective + 0.5 * std::numbers::pi));
}

void MziState::validate() const {
  if (!(crosstalk >= 0.0 && crosstalk <= 0.05)) {
    throw Error(ErrorKind::kInvalidArgument, "MZI crosstalk must lie in [0, 0.05]");
  }
}

double cmrr_db(const MziState& mzi, double r1_a_per_w, double r2_a_per_w,
               double tone_depth, double ceiling_db) {
  mzi.validate();
  if (!(r1_a_per_w > 0.0 && r2_a_per_w > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "responsivities must be positive");
  }
  if (!(tone_depth > 0.0)) throw Error(ErrorKind::kInvalidArgument, "tone depth must be > 0");
  const double t = mzi.reflectivity();
  // Photocurrent tone amplitude per unit LO power in each configuration.
  const double sum = tone_depth * (r1_a_per_w * t + r2_a_per_w * (1.0 - t));
  const double diff = tone_depth * std::abs(r1_a_per_w * t - r2_a_per_w * (1.0 - t));
  if (diff == 0.0) return ceiling_db;
  return std::min(ceiling_db, 20.0 * std::log10(sum / diff));
}

PidLockResult pid_lock_mzi(const MziState& initial, std::span<const double> lo_phase,
                           const PidGains& gains, double setpoint) {
  initial.validate();
  if (lo_phase.empty()) throw Error(ErrorKind::kInvalidArgument, "PID needs at least one step");
  if (!std::isfinite(gains.kp) || !std::isfinite(gains.ki) || !std::isfinite(gains.kd)) {
    throw Error(ErrorKind::kInvalidArgument, "PID gains must be finite");
  }
  const std::size_t steps = lo_phase.size();
  PidLockResult out;
  out.reflectivity.reserve(steps);
  out.phi_mzi.reserve(steps);

  MziState mzi = initial;
  const double bias = initial.phi_mzi;
  double integral = 0.0;
  double previous = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    mzi.phi_lo = lo_phase[k];
    const double measured = mzi.reflectivity();
    out.reflectivity.push_back(measured);
    out.phi_mzi.push_back(mzi.phi_mzi);

    const double error = measured - setpoint;
    integral += error;
    const double derivative = k > 0 ? measured - previous : 0.0;
    previous = measured;
    const double command =
        bias - (gains.kp * error + gains.ki * integral + gains.kd * derivative);
    out.control_effort += std::abs(command - mzi.phi_mzi);
    mzi.phi_mzi = command;
  }

  const std::size_t window = std::max<std::size_t>(1, steps / 10);
  double lo = 1.0, hi = 0.0;
  out.locked = true;
  for (std::size_t k = steps - window; k < steps; ++k) {
    const double r = out.reflectivity[k];
    if (!(std::abs(r - setpoint) < kLockTolerance)) out.locked = false;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  out.oscillating = (hi - lo) > 0.1;
  return out;
}

}  // namespace homodyne
