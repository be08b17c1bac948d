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

#include "homodyne/quadrature.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>

#include "homodyne/error.h"
#include "homodyne/random.h"

namespace homodyne {
namespace {

constexpr std::size_t kChunkSize = 1 << 16;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_two_pi(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

double scheduled_phase(const PhaseSchedule& s, std::size_t i, Rng& rng) {
  switch (s.kind) {
    case PhaseSchedule::Kind::kUniform:
      return kTwoPi * rng.uniform();
    case PhaseSchedule::Kind::kFixed:
      return s.fixed_phases[i % s.fixed_phases.size()];
    case PhaseSchedule::Kind::kTriangle: {
      const double f = std::fmod(static_cast<double>(i) / s.period_samples, 1.0);
      const double wave = f < 0.5 ? 2.0 * f : 2.0 - 2.0 * f;
      return s.offset + s.amplitude * wave;
    }
    case PhaseSchedule::Kind::kSawtooth: {
      const double f = std::fmod(static_cast<double>(i) / s.period_samples, 1.0);
      return s.offset + s.amplitude * f;
    }
  }
  return 0.0;
}

// Density on the tabulation grid for one phase, from per-offdiagonal
// profiles S_k(x) = sum_m rho_{m,m+k} psi_m(x) psi_{m+k}(x).
class DensityTabulator {
 public:
  explicit DensityTabulator(const DensityMatrix& rho)
      : cutoff_(rho.cutoff()),
        profiles_(kTablePoints, cutoff_) {
    std::vector<double> psi(cutoff_);
    for (int j = 0; j < kTablePoints; ++j) {
      fock_wavefunctions(grid_x(j), psi);
      for (int k = 0; k < cutoff_; ++k) {
        std::complex<double> acc = 0.0;
        for (int m = 0; m + k < cutoff_; ++m) acc += rho(m, m + k) * (psi[m] * psi[m + k]);
        profiles_(j, k) = acc;
      }
    }
  }

  static double grid_x(int j) {
    return -kTableHalfWidth + 2.0 * kTableHalfWidth * j / (kTablePoints - 1);
  }

  // Unnormalised cumulative distribution on the grid.
  void cdf(double theta, std::vector<double>& out) const {
    out.assign(kTablePoints, 0.0);
    Eigen::VectorXcd phase(cutoff_);
    for (int k = 0; k < cutoff_; ++k) phase(k) = std::polar(k == 0 ? 1.0 : 2.0, k * theta);
    const double dx = 2.0 * kTableHalfWidth / (kTablePoints - 1);
    double prev = 0.0;
    for (int j = 0; j < kTablePoints; ++j) {
      double p = 0.0;
      for (int k = 0; k < cutoff_; ++k) p += (profiles_(j, k) * phase(k)).real();
      p = std::max(p, 0.0);
      if (j > 0) out[j] = out[j - 1] + 0.5 * (p + prev) * dx;
      prev = p;
    }
  }

 private:
  int cutoff_;
  Eigen::MatrixXcd profiles_;
};

double invert_cdf(const std::vector<double>& cdf, double u) {
  const double target = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  if (it == cdf.begin()) return DensityTabulator::grid_x(0);
  if (it == cdf.end()) return DensityTabulator::grid_x(kTablePoints - 1);
  const int hi = static_cast<int>(it - cdf.begin());
  const int lo = hi - 1;
  const double span = cdf[hi] - cdf[lo];
  const double frac = span > 0.0 ? (target - cdf[lo]) / span : 0.5;
  return DensityTabulator::grid_x(lo) +
         frac * (DensityTabulator::grid_x(hi) - DensityTabulator::grid_x(lo));
}

}  // namespace

double fock_wavefunction(int n, double x) {
  if (n < 0) throw Error(ErrorKind::kInvalidArgument, "negative Fock level");
  std::vector<double> psi(n + 1);
  fock_wavefunctions(x, psi);
  return psi[n];
}

void fock_wavefunctions(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = std::exp(-0.5 * x * x) / std::sqrt(std::sqrt(std::numbers::pi));
  if (out.size() > 1) out[1] = std::sqrt(2.0) * x * out[0];
  for (std::size_t n = 1; n + 1 < out.size(); ++n) {
    const double nd = static_cast<double>(n);
    out[n + 1] = std::sqrt(2.0 / (nd + 1.0)) * x * out[n] -
                 std::sqrt(nd / (nd + 1.0)) * out[n - 1];
  }
}

double QuadratureSample::internal_x() const {
  return units == QuadratureUnits::kShotNoise ? shot_noise_to_internal(x) : x;
}

QuadratureDensity::QuadratureDensity(const DensityMatrix& rho, double theta)
    : kernel_(rho.cutoff(), rho.cutoff()), theta_(theta) {
  const int n = rho.cutoff();
  const double norm = rho.trace();
  for (int m = 0; m < n; ++m) {
    for (int l = 0; l < n; ++l) {
      kernel_(m, l) = (rho(m, l) * std::polar(1.0, (l - m) * theta)).real() / norm;
    }
  }
}

double QuadratureDensity::operator()(double x) const {
  const int n = static_cast<int>(kernel_.rows());
  Eigen::VectorXd psi(n);
  fock_wavefunctions(x, std::span<double>(psi.data(), n));
  return std::max(0.0, psi.dot(kernel_ * psi));
}

QuadratureDensity quadrature_density(const DensityMatrix& rho, double theta) {
  return QuadratureDensity(rho, theta);
}

PhaseSchedule PhaseSchedule::uniform() { return {}; }

PhaseSchedule PhaseSchedule::triangle(double offset, double amplitude,
                                      double period_samples) {
  PhaseSchedule s;
  s.kind = Kind::kTriangle;
  s.offset = offset;
  s.amplitude = amplitude;
  s.period_samples = period_samples;
  return s;
}

PhaseSchedule PhaseSchedule::sawtooth(double offset, double amplitude,
                                      double period_samples) {
  PhaseSchedule s = triangle(offset, amplitude, period_samples);
  s.kind = Kind::kSawtooth;
  return s;
}

PhaseSchedule PhaseSchedule::fixed(std::vector<double> phases) {
  PhaseSchedule s;
  s.kind = Kind::kFixed;
  s.fixed_phases = std::move(phases);
  return s;
}

double gaussian_variance(const GaussianProvenance& g, double theta) {
  const double c = std::cos(theta - g.theta_sq);
  const double s = std::sin(theta - g.theta_sq);
  return g.eta * (std::exp(-2.0 * g.r) * c * c + std::exp(2.0 * g.r) * s * s) +
         (1.0 - g.eta);
}

std::vector<QuadratureSample> sample_quadratures(const DensityMatrix& rho,
                                                 const PhaseSchedule& schedule,
                                                 std::size_t count,
                                                 std::uint64_t seed,
                                                 const SamplingOptions& options) {
  if (count == 0) throw Error(ErrorKind::kInvalidArgument, "sample count must be >= 1");
  if (schedule.kind == PhaseSchedule::Kind::kFixed && schedule.fixed_phases.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "fixed phase schedule is empty");
  }
  if ((schedule.kind == PhaseSchedule::Kind::kTriangle ||
       schedule.kind == PhaseSchedule::Kind::kSawtooth) &&
      !(schedule.period_samples > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "scan period must be positive");
  }

  std::vector<QuadratureSample> out(count);
  std::vector<double> uniforms;
  const bool gaussian = rho.gaussian().has_value() && !options.force_tabulated;
  if (!gaussian) uniforms.resize(count);

  const std::size_t n_chunks = (count + kChunkSize - 1) / kChunkSize;
  parallel_for_chunks(n_chunks, options.threads, [&](std::size_t c) {
    Rng phase_rng(derive_stream(seed, Stream::kPhaseSchedule, c));
    Rng value_rng(derive_stream(seed, Stream::kQuadratureSamples, c));
    const std::size_t end = std::min(count, (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i) {
      const double theta = scheduled_phase(schedule, i, phase_rng);
      out[i].theta = theta;
      out[i].units = QuadratureUnits::kShotNoise;
      if (gaussian) {
        out[i].x = std::sqrt(gaussian_variance(*rho.gaussian(), theta)) * value_rng.normal();
      } else {
        uniforms[i] = value_rng.uniform();
      }
    }
  });
  if (gaussian) return out;

  // Group samples by the phase table they draw from.
  std::vector<double> table_phase;
  std::vector<std::size_t> table_of(count);
  if (schedule.kind == PhaseSchedule::Kind::kFixed) {
    std::map<double, std::size_t> index;
    for (double p : schedule.fixed_phases) {
      if (index.emplace(p, table_phase.size()).second) table_phase.push_back(p);
    }
    for (std::size_t i = 0; i < count; ++i) table_of[i] = index.at(out[i].theta);
  } else {
    const int n_tables = std::max(1, options.phase_table_size);
    for (int t = 0; t < n_tables; ++t) table_phase.push_back(kTwoPi * t / n_tables);
    for (std::size_t i = 0; i < count; ++i) {
      const double w = wrap_two_pi(out[i].theta) / kTwoPi * n_tables;
      const std::size_t t = static_cast<std::size_t>(std::llround(w)) % n_tables;
      table_of[i] = t;
      out[i].theta = table_phase[t];
    }
  }
  std::vector<std::vector<std::size_t>> members(table_phase.size());
  for (std::size_t i = 0; i < count; ++i) members[table_of[i]].push_back(i);

  const DensityTabulator tabulator(rho);
  parallel_for_chunks(table_phase.size(), options.threads, [&](std::size_t t) {
    if (members[t].empty()) return;
    std::vector<double> cdf;
    tabulator.cdf(table_phase[t], cdf);
    for (std::size_t i : members[t]) {
      out[i].x = internal_to_shot_noise(invert_cdf(cdf, uniforms[i]));
    }
  });
  return out;
}

std::string samples_csv(std::span<const QuadratureSample> samples) {
  const bool internal =
      !samples.empty() && samples.front().units == QuadratureUnits::kVacuumHalf;
  std::string out = internal ? "theta_rad,x_vacuum_half\n" : "theta_rad,x_shotnoise\n";
  char line[80];
  for (const auto& s : samples) {
    const double x = internal ? s.internal_x()
                              : (s.units == QuadratureUnits::kShotNoise
                                     ? s.x
                                     : internal_to_shot_noise(s.x));
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", s.theta, x);
    out += line;
  }
  return out;
}

std::vector<QuadratureSample> parse_samples_csv(std::string_view text) {
  std::vector<QuadratureSample> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  QuadratureUnits units = QuadratureUnits::kShotNoise;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (!have_header) {
      if (line == "theta_rad,x_shotnoise") {
        units = QuadratureUnits::kShotNoise;
      } else if (line == "theta_rad,x_vacuum_half") {
        units = QuadratureUnits::kVacuumHalf;
      } else {
        throw Error(ErrorKind::kParseError,
                    "line " + std::to_string(line_no) +
                        ": expected header 'theta_rad,x_shotnoise' or "
                        "'theta_rad,x_vacuum_half'");
      }
      have_header = true;
      continue;
    }
    const std::size_t comma = line.find(',');
    double theta = 0.0, x = 0.0;
    bool ok = comma != std::string::npos;
    if (ok) {
      char* rest = nullptr;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      theta = std::strtod(a.c_str(), &rest);
      ok = rest != a.c_str() && *rest == '\0';
      if (ok) {
        x = std::strtod(b.c_str(), &rest);
        ok = rest != b.c_str() && *rest == '\0';
      }
    }
    if (!ok || !std::isfinite(theta) || !std::isfinite(x)) {
      throw Error(ErrorKind::kParseError,
                  "line " + std::to_string(line_no) + ": malformed sample row '" + line + "'");
    }
    QuadratureSample s{theta, x, units};
    out.push_back({theta, s.internal_x(), QuadratureUnits::kVacuumHalf});
    if (end == text.size()) break;
  }
  if (!have_header) throw Error(ErrorKind::kParseError, "sample file has no header");
  return out;
}

}  // namespace homodyne
