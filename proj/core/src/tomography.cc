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

#include "homodyne/tomography.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "homodyne/error.h"
#include "homodyne/random.h"
#include "json.hpp"

namespace homodyne {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_two_pi(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

double circular_distance(double a, double b) {
  const double d = std::abs(wrap_two_pi(a) - wrap_two_pi(b));
  return std::min(d, kTwoPi - d);
}

// Per-phase work for one likelihood pass: probabilities of the observed
// bins and the phase's contribution to R.
class LikelihoodModel {
 public:
  LikelihoodModel(const BinnedData& data, const HomodynePovm& povm, double floor)
      : data_(data), povm_(povm), floor_(floor), dim_(povm.dim().cutoff()) {
    const double total = static_cast<double>(data.total());
    active_.resize(data.n_phases());
    for (std::size_t k = 0; k < data.n_phases(); ++k) {
      for (std::size_t b = 0; b < data.n_bins(); ++b) {
        const std::uint64_t n = data.count(k, b);
        if (n > 0) active_[k].push_back({b, static_cast<double>(n), n / total});
      }
    }
    phase_factors_.resize(data.n_phases());
    for (std::size_t k = 0; k < data.n_phases(); ++k) {
      Eigen::VectorXcd c(dim_);
      for (int m = 0; m < dim_; ++m) c(m) = std::polar(1.0, m * povm.phases()[k]);
      phase_factors_[k] = c;
    }
  }

  struct Pass {
    double log_likelihood = 0.0;
    Eigen::MatrixXcd r;
    std::size_t clamped = 0;
  };

  Pass evaluate(const Eigen::MatrixXcd& rho, int threads) const {
    const std::size_t n_phases = active_.size();
    std::vector<double> ll(n_phases, 0.0);
    std::vector<std::size_t> clamped(n_phases, 0);
    std::vector<Eigen::MatrixXcd> r_parts(n_phases);
    parallel_for_chunks(n_phases, threads, [&](std::size_t k) {
      r_parts[k] = Eigen::MatrixXcd::Zero(dim_, dim_);
      if (active_[k].empty()) return;
      const Eigen::VectorXcd& c = phase_factors_[k];
      // Re(rho_mn e^{-i(m-n)theta}); Tr(rho Pi) = sum A_mn O_mn.
      const Eigen::MatrixXd rotated =
          (c.conjugate().asDiagonal() * rho * c.asDiagonal()).real();
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim_, dim_);
      for (const auto& bin : active_[k]) {
        const Eigen::MatrixXd& overlap = povm_.bin_overlap(bin.index);
        double p = rotated.cwiseProduct(overlap).sum();
        if (p < floor_) {
          p = floor_;
          ++clamped[k];
        }
        ll[k] += bin.count * std::log(p);
        s += (bin.frequency / p) * overlap;
      }
      r_parts[k] = c.asDiagonal() * s.cast<std::complex<double>>() * c.conjugate().asDiagonal();
    });
    Pass pass;
    pass.r = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (std::size_t k = 0; k < n_phases; ++k) {
      pass.log_likelihood += ll[k];
      pass.clamped += clamped[k];
      pass.r += r_parts[k];
    }
    return pass;
  }

 private:
  struct ActiveBin {
    std::size_t index;
    double count;
    double frequency;
  };
  const BinnedData& data_;
  const HomodynePovm& povm_;
  double floor_;
  int dim_;
  std::vector<std::vector<ActiveBin>> active_;
  std::vector<Eigen::VectorXcd> phase_factors_;
};

Eigen::MatrixXcd normalised_sandwich(const Eigen::MatrixXcd& op, const Eigen::MatrixXcd& rho) {
  Eigen::MatrixXcd next = op * rho * op;
  next = 0.5 * (next + next.adjoint()).eval();
  return next / next.trace().real();
}

void check_grid(const BinnedData& data, const HomodynePovm& povm) {
  if (data.phases() != povm.phases() || data.edges() != povm.edges()) {
    throw Error(ErrorKind::kGridMismatch, "binned data and POVM use different grids");
  }
}

std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double triangle_wave(double cycles) {
  const double f = std::fmod(cycles, 1.0);
  return f < 0.5 ? 2.0 * f : 2.0 - 2.0 * f;
}

}  // namespace

BinnedData::BinnedData(std::vector<double> phases, std::vector<double> edges,
                       std::vector<std::uint64_t> counts)
    : phases_(std::move(phases)), edges_(std::move(edges)), counts_(std::move(counts)) {
  if (counts_.size() != phases_.size() * (edges_.size() + 1)) {
    throw Error(ErrorKind::kInvalidArgument, "count table does not match phase and bin grid");
  }
}

std::uint64_t BinnedData::total() const {
  std::uint64_t sum = 0;
  for (auto c : counts_) sum += c;
  return sum;
}

std::size_t BinnedData::populated_phases() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < n_phases(); ++k) {
    for (std::size_t b = 0; b < n_bins(); ++b) {
      if (count(k, b) > 0) {
        ++n;
        break;
      }
    }
  }
  return n;
}

BinnedData bin_samples(std::span<const QuadratureSample> samples, const HomodynePovm& povm) {
  struct Target {
    double angle;
    std::size_t phase;
    bool folded;
  };
  std::vector<Target> targets;
  for (std::size_t k = 0; k < povm.n_phases(); ++k) {
    targets.push_back({wrap_two_pi(povm.phases()[k]), k, false});
    targets.push_back({wrap_two_pi(povm.phases()[k] + kPi), k, true});
  }
  std::stable_sort(targets.begin(), targets.end(),
                   [](const Target& a, const Target& b) { return a.angle < b.angle; });
  const double bound = kPi / (2.0 * povm.n_phases()) + 1e-9;
  const auto& edges = povm.edges();

  std::vector<std::uint64_t> counts(povm.n_outcomes(), 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double theta = wrap_two_pi(samples[i].theta);
    const auto it = std::lower_bound(
        targets.begin(), targets.end(), theta,
        [](const Target& t, double value) { return t.angle < value; });
    const std::size_t hi = static_cast<std::size_t>(it - targets.begin()) % targets.size();
    const std::size_t lo = (hi + targets.size() - 1) % targets.size();
    const double d_lo = circular_distance(theta, targets[lo].angle);
    const double d_hi = circular_distance(theta, targets[hi].angle);
    const Target& best = d_lo <= d_hi ? targets[lo] : targets[hi];
    const double distance = std::min(d_lo, d_hi);
    if (distance > bound) {
      throw Error(ErrorKind::kPhaseGridTooCoarse,
                  "sample " + std::to_string(i) + " at phase " + format_g(samples[i].theta) +
                      " rad lies " + format_g(distance) +
                      " rad from the nearest grid phase; use more phases");
    }
    double x = samples[i].internal_x();
    if (best.folded) x = -x;
    const std::size_t bin =
        static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
    ++counts[povm.outcome_index(best.phase, bin)];
  }
  return BinnedData(povm.phases(), povm.edges(), std::move(counts));
}

double log_likelihood(const BinnedData& data, const HomodynePovm& povm,
                      const Eigen::MatrixXcd& rho, double floor) {
  check_grid(data, povm);
  return LikelihoodModel(data, povm, floor).evaluate(rho, 1).log_likelihood;
}

MleReport mle_reconstruct(const BinnedData& data, const HomodynePovm& povm,
                          const MleOptions& options) {
  check_grid(data, povm);
  if (data.total() == 0) {
    throw Error(ErrorKind::kInvalidArgument, "cannot reconstruct from zero counts");
  }
  if (options.max_iterations < 1 || !(options.tolerance > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "invalid stopping criteria");
  }
  const int d = povm.dim().cutoff();
  const LikelihoodModel model(data, povm, options.probability_floor);
  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(d, d);

  Eigen::MatrixXcd rho = identity / static_cast<double>(d);
  auto pass = model.evaluate(rho, options.threads);

  MleReport report{.rho = maximally_mixed(povm.dim())};
  report.seed = options.seed;
  report.zero_probability_events = pass.clamped;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::MatrixXcd next = normalised_sandwich(pass.r, rho);
    auto next_pass = model.evaluate(next, options.threads);
    report.zero_probability_events += next_pass.clamped;
    if (next_pass.log_likelihood < pass.log_likelihood - options.monotonic_slack) {
      ++report.diluted_steps;
      double eps = 0.5;
      for (int halving = 0; halving < 60; ++halving, eps *= 0.5) {
        next = normalised_sandwich(identity + eps * pass.r, rho);
        next_pass = model.evaluate(next, options.threads);
        report.zero_probability_events += next_pass.clamped;
        if (next_pass.log_likelihood >= pass.log_likelihood - options.monotonic_slack) break;
      }
    }
    const double delta = (next - rho).cwiseAbs().maxCoeff();
    rho = std::move(next);
    pass = std::move(next_pass);
    report.iterations = it;
    report.final_delta = delta;
    report.log_likelihood.push_back(pass.log_likelihood);
    if (options.progress) options.progress(it, pass.log_likelihood, delta);
    if (delta < options.tolerance) {
      report.converged = true;
      break;
    }
  }
  report.rho = DensityMatrix(povm.dim(), rho);
  return report;
}

std::string mle_report_json(const MleReport& report) {
  nlohmann::ordered_json j;
  j["rho"] = nlohmann::ordered_json::parse(to_json(report.rho));
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["final_delta"] = report.final_delta;
  j["final_log_likelihood"] =
      report.log_likelihood.empty() ? 0.0 : report.log_likelihood.back();
  j["seed"] = report.seed;
  j["zero_probability_events"] = report.zero_probability_events;
  j["diluted_steps"] = report.diluted_steps;
  j["log_likelihood"] = report.log_likelihood;
  return j.dump(2) + "\n";
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.cutoff() != sigma.cutoff()) {
    throw Error(ErrorKind::kInvalidArgument, "fidelity of states with different cutoffs");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_rho(rho.elements());
  const Eigen::VectorXd root = es_rho.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXcd sqrt_rho =
      es_rho.eigenvectors() * root.asDiagonal() * es_rho.eigenvectors().adjoint();
  Eigen::MatrixXcd inner = sqrt_rho * sigma.elements() * sqrt_rho;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_inner(inner, Eigen::EigenvaluesOnly);
  const double trace_root = es_inner.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(trace_root * trace_root, 0.0, 1.0);
}

std::vector<ScanRecord> simulate_phase_scan(const DensityMatrix& rho, const ScanSettings& scan,
                                            const PhaseCalibration& calibration,
                                            std::size_t count, std::uint64_t seed,
                                            int threads) {
  if (!(scan.drive_hz > 0.0) || !(scan.sample_rate_hz > scan.drive_hz)) {
    throw Error(ErrorKind::kInvalidArgument, "scan needs 0 < drive rate < sample rate");
  }
  const double period = scan.sample_rate_hz / scan.drive_hz;
  const double span_v = scan.v_high - scan.v_low;
  const auto schedule = PhaseSchedule::triangle(calibration.phase(scan.v_low),
                                                calibration.rad_per_volt * span_v, period);
  SamplingOptions sampling;
  sampling.threads = threads;
  const auto samples = sample_quadratures(rho, schedule, count, seed, sampling);
  std::vector<ScanRecord> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].time_s = i / scan.sample_rate_hz;
    out[i].drive_v = scan.v_low + span_v * triangle_wave(i / period);
    out[i].x = samples[i].x;
  }
  return out;
}

PhaseCalibration fit_phase_calibration(std::span<const ScanRecord> records, int voltage_bins) {
  if (records.size() < 16 || voltage_bins < 8) {
    throw Error(ErrorKind::kInsufficientPoints, "too few scan records to calibrate phase");
  }
  double v_lo = std::numeric_limits<double>::infinity(), v_hi = -v_lo;
  for (const auto& r : records) {
    v_lo = std::min(v_lo, r.drive_v);
    v_hi = std::max(v_hi, r.drive_v);
  }
  const double span = v_hi - v_lo;
  if (!(span > 0.0)) {
    throw Error(ErrorKind::kInsufficientPoints, "drive voltage is constant; nothing to fit");
  }
  std::vector<double> sum(voltage_bins, 0.0), sum_sq(voltage_bins, 0.0);
  std::vector<std::size_t> n(voltage_bins, 0);
  for (const auto& r : records) {
    const int b = std::min(voltage_bins - 1,
                           static_cast<int>((r.drive_v - v_lo) / span * voltage_bins));
    sum[b] += r.x;
    sum_sq[b] += r.x * r.x;
    ++n[b];
  }
  std::vector<double> v, var;
  for (int b = 0; b < voltage_bins; ++b) {
    if (n[b] < 2) continue;
    const double mean = sum[b] / n[b];
    v.push_back(v_lo + (b + 0.5) * span / voltage_bins);
    var.push_back((sum_sq[b] - n[b] * mean * mean) / (n[b] - 1));
  }
  const int m = static_cast<int>(v.size());
  if (m < 8) throw Error(ErrorKind::kInsufficientPoints, "too few populated voltage bins");

  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(var.data(), m);
  auto solve = [&](double k, Eigen::Vector3d& coef) {
    Eigen::MatrixXd a(m, 3);
    for (int i = 0; i < m; ++i) a.row(i) << 1.0, std::cos(k * v[i]), std::sin(k * v[i]);
    coef = a.colPivHouseholderQr().solve(y);
    return (a * coef - y).squaredNorm();
  };
  // A full variance period spans pi in phase, i.e. k * span >= 2 pi.
  const double k_min = kTwoPi / span;
  const double k_max = kPi * m / (2.0 * span);
  constexpr int kGrid = 2000;
  double best_k = k_min, best_rss = std::numeric_limits<double>::infinity();
  Eigen::Vector3d coef;
  for (int i = 0; i <= kGrid; ++i) {
    const double k = 0.5 * k_min + (k_max - 0.5 * k_min) * i / kGrid;
    const double rss = solve(k, coef);
    if (rss < best_rss) {
      best_rss = rss;
      best_k = k;
    }
  }
  // Golden-section refinement within one grid step.
  const double step = (k_max - 0.5 * k_min) / kGrid;
  double a = best_k - step, b = best_k + step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < 100; ++i) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (solve(c, coef) < solve(d, coef)) {
      b = d;
    } else {
      a = c;
    }
  }
  best_k = 0.5 * (a + b);
  best_rss = solve(best_k, coef);
  const double amplitude = std::hypot(coef(1), coef(2));
  const double noise = std::sqrt(best_rss / std::max(1, m - 3));
  if (best_k < k_min * (1.0 - 1e-6) || !(amplitude > 3.0 * noise)) {
    throw Error(ErrorKind::kInsufficientPoints,
                "variance trace does not span a resolvable full period of phase");
  }
  const double phi = std::atan2(coef(2), coef(1));
  PhaseCalibration cal;
  cal.rad_per_volt = 0.5 * best_k;
  cal.offset_rad = -0.5 * (phi + kPi);
  return cal;
}

ScanReconstruction reconstruct_samples(std::span<const QuadratureSample> samples,
                                       const ScanReconstructionOptions& options) {
  if (samples.empty()) throw Error(ErrorKind::kInsufficientPoints, "no samples to reconstruct");
  if (options.n_phases < 1) throw Error(ErrorKind::kInvalidArgument, "n_phases must be >= 1");
  const FockDim dim(options.cutoff);

  // Widest per-phase spread sets the bin range.
  const int n_phases = options.n_phases;
  std::vector<double> second(n_phases, 0.0);
  std::vector<std::size_t> members(n_phases, 0);
  double overall = 0.0;
  for (const auto& s : samples) {
    const double x = s.internal_x();
    const double w = std::fmod(wrap_two_pi(s.theta), kPi) / kPi * n_phases;
    const int k = static_cast<int>(std::llround(w)) % n_phases;
    second[k] += x * x;
    ++members[k];
    overall += x * x;
  }
  double widest = 0.0;
  for (int k = 0; k < n_phases; ++k) {
    if (members[k] >= 10) widest = std::max(widest, second[k] / members[k]);
  }
  if (!(widest > 0.0)) widest = overall / samples.size();
  if (!(widest > 0.0)) throw Error(ErrorKind::kInvalidArgument, "all samples are zero");

  const auto povm = build_povm(dim, default_bin_edges(std::sqrt(widest), options.n_inner_bins),
                               uniform_phases(n_phases));
  const BinnedData data = bin_samples(samples, povm);

  ScanReconstruction out{.report = mle_reconstruct(data, povm, options.mle)};
  if (data.populated_phases() < 2) {
    out.warnings.push_back(
        "underdetermined: all samples share a single LO phase, so off-diagonal phase "
        "information is missing; the reconstruction is not constrained in phase");
  }
  if (!out.report.converged) {
    out.warnings.push_back("maximum-likelihood iteration stopped at the iteration limit");
  }
  const auto spec = WignerGridSpec::covering(out.report.rho, 6.0, options.wigner_points);
  out.wigner = wigner(out.report.rho, spec);
  out.squeezed_contour_level = out.wigner.one_over_e_level;
  out.vacuum_contour_level = 1.0 / (kPi * std::numbers::e);
  out.squeezed_axes = one_over_e_axes(out.report.rho, out.wigner);
  return out;
}

ScanReconstruction reconstruct_from_scan(std::span<const ScanRecord> records,
                                         const PhaseCalibration& calibration,
                                         const ScanReconstructionOptions& options) {
  std::vector<QuadratureSample> samples(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    samples[i].theta = calibration.phase(records[i].drive_v);
    samples[i].x = records[i].x;
    samples[i].units = QuadratureUnits::kShotNoise;
  }
  return reconstruct_samples(samples, options);
}

std::string scan_records_csv(std::span<const ScanRecord> records) {
  std::string out = "time_s,drive_v,x_shotnoise\n";
  char line[96];
  for (const auto& r : records) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", r.time_s, r.drive_v, r.x);
    out += line;
  }
  return out;
}

std::vector<ScanRecord> parse_scan_records_csv(std::string_view text) {
  std::vector<ScanRecord> out;
  std::size_t pos = 0, line_no = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      if (line != "time_s,drive_v,x_shotnoise") {
        throw Error(ErrorKind::kParseError, "line " + std::to_string(line_no) +
                                                ": expected header 'time_s,drive_v,x_shotnoise'");
      }
      have_header = true;
      continue;
    }
    double values[3];
    const char* cursor = line.c_str();
    bool ok = true;
    for (int f = 0; f < 3 && ok; ++f) {
      char* stop = nullptr;
      values[f] = std::strtod(cursor, &stop);
      ok = stop != cursor && std::isfinite(values[f]) && *stop == (f < 2 ? ',' : '\0');
      cursor = stop + 1;
    }
    if (!ok) {
      throw Error(ErrorKind::kParseError,
                  "line " + std::to_string(line_no) + ": malformed scan row '" + line + "'");
    }
    out.push_back({values[0], values[1], values[2]});
  }
  if (!have_header) throw Error(ErrorKind::kParseError, "scan file has no header");
  return out;
}

}  // namespace homodyne
