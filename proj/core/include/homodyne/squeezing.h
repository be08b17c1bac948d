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

#ifndef HOMODYNE_SQUEEZING_H_
#define HOMODYNE_SQUEEZING_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homodyne/detector.h"
#include "homodyne/noise_trace.h"

namespace homodyne {

struct SqueezerSpec {
  double mu = 0.044;      // mW^-1/2; squeezing parameter r = mu sqrt(P_pump)
  double p_shg_mw = 0.0;  // pump power delivered to the squeezer
  LossBudget source_losses;

  double squeezing_parameter() const;
  void validate() const;
};

// Anti-squeezed and squeezed quadrature variances (shot-noise units) at one
// pump power. Either branch may be absent in measured data.
struct VariancePair {
  double p_shg_mw = 0.0;
  std::optional<double> v_max;
  std::optional<double> v_min;
};

// V = eta exp(+-2r) + 1 - eta with r = mu sqrt(p). Throws kInvalidArgument
// for eta outside [0, 1] or negative mu, p.
VariancePair eq1_forward(double eta_total, double mu, double p_shg_mw);

enum class FitSpace { kLinear, kDecibel };
enum class FitBranches { kJoint, kSeparate };

struct Eq1FitOptions {
  FitSpace space = FitSpace::kLinear;
  FitBranches branches = FitBranches::kJoint;
  // Residuals are (V_model - V) / V in linear space, which weights each
  // point by 1/V^2; disable for unit weights.
  bool relative_weights = true;
  double max_condition = 1e8;
  int max_iterations = 200;
};

struct Eq1Estimate {
  double eta = 0.0;
  double eta_stderr = 0.0;
  double mu = 0.0;
  double mu_stderr = 0.0;
  double eta_mu_covariance = 0.0;
  std::size_t n_points = 0;
  double residual_norm = 0.0;  // sqrt of weighted RSS
  double condition = 0.0;      // of the column-scaled normal matrix
};

struct Eq1Fit {
  Eq1Estimate estimate;
  // Per-branch fits in kSeparate mode (MAX first); `estimate` is then their
  // inverse-variance weighted combination.
  std::vector<Eq1Estimate> branch_estimates;
  std::string weighting;
  std::string space;
  std::string branches;
};

// Weighted least squares of eq1_forward over (eta, mu), projected onto
// eta in [0, 1], mu >= 0. Standard errors come from s^2 (J^T J)^-1.
// Throws kUnderdetermined with fewer than three distinct pump powers or when
// the scaled normal matrix is worse conditioned than `max_condition`, and
// kFitDiverged if the iteration fails.
Eq1Fit fit_eq1(std::span<const VariancePair> pairs, const Eq1FitOptions& options = {});

// {eta_hat, eta_stderr, mu_hat, mu_stderr, n_points, residual_norm, weighting, ...}
std::string eq1_fit_json(const Eq1Fit& fit);

struct FrequencyBand {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
};

struct SqueezingSpectrum {
  std::vector<double> freq_hz;
  std::vector<double> squeezing_db;  // NaN where masked
  std::vector<bool> masked;
  std::vector<std::string> mask_reason;  // empty where not masked

  std::size_t masked_count() const;
  // Mean of the unmasked dB values with f in [lo, hi]; NaN if none.
  double mean_db(double lo_hz, double hi_hz) const;
};

// S(f) = 10 log10((P_sq - P_dark) / (P_shot - P_dark)) in linear power.
// Points with P_sq <= P_dark or P_shot <= P_dark are masked, as are points
// inside any of `excluded`. Throws kGridMismatch.
SqueezingSpectrum squeezing_vs_frequency(const NoiseTrace& squeezed, const NoiseTrace& shot,
                                         const NoiseTrace& dark,
                                         std::span<const FrequencyBand> excluded = {});

// "freq_hz,squeezing_db,masked"; masked rows carry an empty dB field.
std::string squeezing_spectrum_csv(const SqueezingSpectrum& spectrum);

struct SourceVariance {
  double variance = 0.0;       // shot-noise units
  double squeezing_db = 0.0;   // -10 log10(variance); positive when squeezed
};

// Inverts the loss channel: V_src = (V - (1 - eta)) / eta. Throws
// kInvalidEta outside (0, 1] and kUnphysical when V <= 1 - eta.
SourceVariance loss_correct(double measured_variance, double eta_total);

struct ScanExtrema {
  double v_min = 0.0;
  double v_max = 0.0;
};

// Robust extrema of a variance-versus-phase trace: the given lower and upper
// percentiles (linear interpolation between order statistics).
ScanExtrema scan_extrema(std::span<const double> variances, double lower_percentile = 2.0,
                         double upper_percentile = 98.0);

}  // namespace homodyne

#endif  // HOMODYNE_SQUEEZING_H_
