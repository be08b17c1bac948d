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

#include "homodyne/squeezing.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "homodyne/error.h"
#include "json.hpp"
#include "least_squares.h"

namespace homodyne {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct BranchPoint {
  double p_mw;
  double variance;
  double sign;  // +1 anti-squeezed, -1 squeezed
};

double model_variance(double eta, double mu, const BranchPoint& pt) {
  const double r = mu * std::sqrt(pt.p_mw);
  return eta * std::exp(pt.sign * 2.0 * r) + 1.0 - eta;
}

class Eq1Residuals {
 public:
  Eq1Residuals(const std::vector<BranchPoint>& points, const Eq1FitOptions& options)
      : points_(points), options_(options) {}

  void residuals(double eta, double mu, Eigen::VectorXd& r) const {
    for (std::size_t j = 0; j < points_.size(); ++j) {
      const auto& pt = points_[j];
      const double m = model_variance(eta, mu, pt);
      if (options_.space == FitSpace::kDecibel) {
        r(j) = m > 0.0 ? 10.0 * std::log10(m / pt.variance) : 1e6;
      } else {
        r(j) = options_.relative_weights ? (m - pt.variance) / pt.variance : m - pt.variance;
      }
    }
  }

  void jacobian(double eta, double mu, Eigen::MatrixXd& jac) const {
    for (std::size_t j = 0; j < points_.size(); ++j) {
      const auto& pt = points_[j];
      const double root_p = std::sqrt(pt.p_mw);
      const double e = std::exp(pt.sign * 2.0 * mu * root_p);
      double d_eta = e - 1.0;
      double d_mu = eta * pt.sign * 2.0 * root_p * e;
      double scale = 1.0;
      if (options_.space == FitSpace::kDecibel) {
        const double m = eta * e + 1.0 - eta;
        scale = m > 0.0 ? 10.0 / (std::log(10.0) * m) : 0.0;
      } else if (options_.relative_weights) {
        scale = 1.0 / pt.variance;
      }
      jac(j, 0) = scale * d_eta;
      jac(j, 1) = scale * d_mu;
    }
  }

  double rss(double eta, double mu) const {
    Eigen::VectorXd r(points_.size());
    residuals(eta, mu, r);
    return r.squaredNorm();
  }

 private:
  const std::vector<BranchPoint>& points_;
  const Eq1FitOptions& options_;
};

Eq1Estimate fit_points(const std::vector<BranchPoint>& points, const Eq1FitOptions& options) {
  std::set<double> powers;
  double p_max = 0.0;
  for (const auto& pt : points) {
    powers.insert(pt.p_mw);
    p_max = std::max(p_max, pt.p_mw);
  }
  if (powers.size() < 3 || !(p_max > 0.0)) {
    throw Error(ErrorKind::kUnderdetermined,
                "squeezing fit needs variances at three or more distinct nonzero pump "
                "powers; add measurements at further pump levels");
  }
  const Eq1Residuals model(points, options);

  // Coarse grid start: eta on a uniform grid, r(P_max) on a log grid.
  double best_eta = 0.5, best_mu = 0.0, best_rss = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 50; ++i) {
    const double eta = 0.02 * i;
    for (int k = 0; k < 60; ++k) {
      const double r_top = 0.005 * std::pow(600.0, k / 59.0);
      const double mu = r_top / std::sqrt(p_max);
      const double rss = model.rss(eta, mu);
      if (rss < best_rss) {
        best_rss = rss;
        best_eta = eta;
        best_mu = mu;
      }
    }
  }

  const int n = static_cast<int>(points.size());
  internal::LeastSquaresProblem problem;
  problem.n_params = 2;
  problem.n_residuals = n;
  problem.residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    model.residuals(x(0), x(1), r);
  };
  problem.jacobian = [&](const Eigen::VectorXd& x, Eigen::MatrixXd& jac) {
    model.jacobian(x(0), x(1), jac);
  };
  Eigen::VectorXd x0(2);
  x0 << best_eta, best_mu;
  const auto result = internal::solve_least_squares(problem, x0, options.max_iterations);

  Eq1Estimate est;
  est.eta = std::clamp(result.x(0), 0.0, 1.0);
  est.mu = std::max(result.x(1), 0.0);
  est.n_points = points.size();
  Eigen::MatrixXd jac(n, 2);
  model.jacobian(est.eta, est.mu, jac);
  const double rss = model.rss(est.eta, est.mu);
  est.residual_norm = std::sqrt(rss);
  // Checked before convergence: a flat valley stalls the solver.
  est.condition = internal::normal_matrix_condition(jac);
  if (!(est.condition <= options.max_condition)) {
    throw Error(ErrorKind::kUnderdetermined,
                "efficiency and pump coefficient are not jointly identifiable from these "
                "points (condition number " + std::to_string(est.condition) +
                    "); supply both squeezed and anti-squeezed branches or a wider pump range");
  }
  if (!result.converged) {
    throw Error(ErrorKind::kFitDiverged,
                "squeezing fit did not converge (status " + std::to_string(result.status) + ")");
  }
  const Eigen::MatrixXd cov = internal::scaled_covariance(jac, rss);
  est.eta_stderr = std::sqrt(cov(0, 0));
  est.mu_stderr = std::sqrt(cov(1, 1));
  est.eta_mu_covariance = cov(0, 1);
  return est;
}

Eq1Estimate combine(const Eq1Estimate& a, const Eq1Estimate& b) {
  auto merge = [](double x, double sx, double y, double sy, double& value, double& err) {
    const double wx = 1.0 / (sx * sx), wy = 1.0 / (sy * sy);
    value = (wx * x + wy * y) / (wx + wy);
    err = 1.0 / std::sqrt(wx + wy);
  };
  Eq1Estimate out;
  merge(a.eta, a.eta_stderr, b.eta, b.eta_stderr, out.eta, out.eta_stderr);
  merge(a.mu, a.mu_stderr, b.mu, b.mu_stderr, out.mu, out.mu_stderr);
  out.eta_mu_covariance = kNaN;
  out.n_points = a.n_points + b.n_points;
  out.residual_norm = std::hypot(a.residual_norm, b.residual_norm);
  out.condition = std::max(a.condition, b.condition);
  return out;
}

std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double SqueezerSpec::squeezing_parameter() const { return mu * std::sqrt(p_shg_mw); }

void SqueezerSpec::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw Error(ErrorKind::kInvalidArgument, "squeezer mu must be >= 0");
  }
  if (!(p_shg_mw >= 0.0) || !std::isfinite(p_shg_mw)) {
    throw Error(ErrorKind::kInvalidArgument, "squeezer pump power must be >= 0");
  }
}

VariancePair eq1_forward(double eta_total, double mu, double p_shg_mw) {
  if (!(eta_total >= 0.0 && eta_total <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "eta_total must lie in [0, 1]");
  }
  if (!(mu >= 0.0) || !(p_shg_mw >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "mu and pump power must be >= 0");
  }
  const double r = mu * std::sqrt(p_shg_mw);
  VariancePair out;
  out.p_shg_mw = p_shg_mw;
  out.v_max = eta_total * std::exp(2.0 * r) + (1.0 - eta_total);
  out.v_min = eta_total * std::exp(-2.0 * r) + (1.0 - eta_total);
  return out;
}

Eq1Fit fit_eq1(std::span<const VariancePair> pairs, const Eq1FitOptions& options) {
  std::vector<BranchPoint> max_points, min_points;
  for (const auto& pair : pairs) {
    if (!(pair.p_shg_mw >= 0.0) || !std::isfinite(pair.p_shg_mw)) {
      throw Error(ErrorKind::kInvalidArgument, "pump powers must be finite and >= 0");
    }
    for (const auto& [v, sign] : {std::pair{pair.v_max, 1.0}, std::pair{pair.v_min, -1.0}}) {
      if (!v) continue;
      if (!(*v > 0.0) || !std::isfinite(*v)) {
        throw Error(ErrorKind::kInvalidArgument, "variances must be finite and positive");
      }
      (sign > 0 ? max_points : min_points).push_back({pair.p_shg_mw, *v, sign});
    }
  }

  Eq1Fit fit;
  fit.space = options.space == FitSpace::kLinear ? "linear" : "decibel";
  fit.weighting = options.space == FitSpace::kDecibel ? "uniform_db"
                  : options.relative_weights          ? "relative_1_over_v2"
                                                      : "uniform";
  if (options.branches == FitBranches::kJoint) {
    fit.branches = "joint";
    std::vector<BranchPoint> all = max_points;
    all.insert(all.end(), min_points.begin(), min_points.end());
    fit.estimate = fit_points(all, options);
    return fit;
  }
  fit.branches = "separate";
  if (max_points.empty() && min_points.empty()) {
    throw Error(ErrorKind::kUnderdetermined, "no variances supplied");
  }
  if (!max_points.empty()) fit.branch_estimates.push_back(fit_points(max_points, options));
  if (!min_points.empty()) fit.branch_estimates.push_back(fit_points(min_points, options));
  fit.estimate = fit.branch_estimates.size() == 2
                     ? combine(fit.branch_estimates[0], fit.branch_estimates[1])
                     : fit.branch_estimates[0];
  return fit;
}

std::string eq1_fit_json(const Eq1Fit& fit) {
  auto to_json = [](const Eq1Estimate& e) {
    nlohmann::ordered_json j;
    j["eta_hat"] = e.eta;
    j["eta_stderr"] = e.eta_stderr;
    j["mu_hat_per_sqrt_mw"] = e.mu;
    j["mu_stderr_per_sqrt_mw"] = e.mu_stderr;
    j["n_points"] = e.n_points;
    j["residual_norm"] = e.residual_norm;
    j["condition_number"] = e.condition;
    return j;
  };
  nlohmann::ordered_json j = to_json(fit.estimate);
  j["weighting"] = fit.weighting;
  j["space"] = fit.space;
  j["branches"] = fit.branches;
  if (!fit.branch_estimates.empty()) {
    j["branch_estimates"] = nlohmann::ordered_json::array();
    for (const auto& e : fit.branch_estimates) j["branch_estimates"].push_back(to_json(e));
  }
  return j.dump(2) + "\n";
}

std::size_t SqueezingSpectrum::masked_count() const {
  return static_cast<std::size_t>(std::count(masked.begin(), masked.end(), true));
}

double SqueezingSpectrum::mean_db(double lo_hz, double hi_hz) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < freq_hz.size(); ++i) {
    if (masked[i] || freq_hz[i] < lo_hz || freq_hz[i] > hi_hz) continue;
    sum += squeezing_db[i];
    ++n;
  }
  return n == 0 ? kNaN : sum / n;
}

SqueezingSpectrum squeezing_vs_frequency(const NoiseTrace& squeezed, const NoiseTrace& shot,
                                         const NoiseTrace& dark,
                                         std::span<const FrequencyBand> excluded) {
  squeezed.validate();
  shot.validate();
  dark.validate();
  if (!same_grid(squeezed, shot) || !same_grid(shot, dark)) {
    throw Error(ErrorKind::kGridMismatch,
                "squeezed, shot and dark traces must share one frequency grid");
  }
  SqueezingSpectrum out;
  const std::size_t n = shot.size();
  out.freq_hz = shot.freq_hz;
  out.squeezing_db.assign(n, kNaN);
  out.masked.assign(n, false);
  out.mask_reason.assign(n, std::string());
  for (std::size_t i = 0; i < n; ++i) {
    const double f = shot.freq_hz[i];
    const double p_dark = dbm_to_mw(dark.power_dbm[i]);
    const double sq_excess = dbm_to_mw(squeezed.power_dbm[i]) - p_dark;
    const double shot_excess = dbm_to_mw(shot.power_dbm[i]) - p_dark;
    std::string reason;
    for (const auto& band : excluded) {
      if (f >= band.lo_hz && f <= band.hi_hz) reason = "excluded_band";
    }
    if (reason.empty() && !(shot_excess > 0.0)) reason = "shot_at_or_below_dark";
    if (reason.empty() && !(sq_excess > 0.0)) reason = "squeezed_at_or_below_dark";
    if (!reason.empty()) {
      out.masked[i] = true;
      out.mask_reason[i] = std::move(reason);
      continue;
    }
    out.squeezing_db[i] = 10.0 * std::log10(sq_excess / shot_excess);
  }
  return out;
}

std::string squeezing_spectrum_csv(const SqueezingSpectrum& spectrum) {
  std::string out = "freq_hz,squeezing_db,masked\n";
  for (std::size_t i = 0; i < spectrum.freq_hz.size(); ++i) {
    out += format_g(spectrum.freq_hz[i]);
    out += ',';
    if (!spectrum.masked[i]) out += format_g(spectrum.squeezing_db[i]);
    out += spectrum.masked[i] ? ",1\n" : ",0\n";
  }
  return out;
}

SourceVariance loss_correct(double measured_variance, double eta_total) {
  if (!(eta_total > 0.0 && eta_total <= 1.0)) {
    throw Error(ErrorKind::kInvalidEta, "eta_total must lie in (0, 1]");
  }
  if (!(measured_variance > 1.0 - eta_total)) {
    throw Error(ErrorKind::kUnphysical,
                "measured variance " + format_g(measured_variance) +
                    " is at or below the loss floor 1 - eta = " + format_g(1.0 - eta_total));
  }
  SourceVariance out;
  out.variance = (measured_variance - (1.0 - eta_total)) / eta_total;
  out.squeezing_db = -10.0 * std::log10(out.variance);
  return out;
}

ScanExtrema scan_extrema(std::span<const double> variances, double lower_percentile,
                         double upper_percentile) {
  if (variances.empty()) throw Error(ErrorKind::kInsufficientPoints, "empty variance trace");
  if (!(lower_percentile >= 0.0 && lower_percentile <= upper_percentile &&
        upper_percentile <= 100.0)) {
    throw Error(ErrorKind::kInvalidArgument, "percentiles must satisfy 0 <= lo <= hi <= 100");
  }
  std::vector<double> sorted(variances.begin(), variances.end());
  std::sort(sorted.begin(), sorted.end());
  auto percentile = [&](double q) {
    const double pos = q / 100.0 * (sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
  };
  return {percentile(lower_percentile), percentile(upper_percentile)};
}

}  // namespace homodyne
