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

#ifndef HOMODYNE_QUADRATURE_H_
#define HOMODYNE_QUADRATURE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "homodyne/fock_state.h"

namespace homodyne {

// Harmonic-oscillator eigenfunction psi_n(x), internal units. Uses the
// normalised three-term recurrence, so no factorials appear.
double fock_wavefunction(int n, double x);

// psi_0(x) .. psi_{count-1}(x) in one pass.
void fock_wavefunctions(double x, std::span<double> out);

enum class QuadratureUnits {
  kShotNoise,    // vacuum variance 1
  kVacuumHalf,   // vacuum variance 1/2 (internal)
};

struct QuadratureSample {
  double theta = 0.0;  // LO phase, radians
  double x = 0.0;
  QuadratureUnits units = QuadratureUnits::kShotNoise;

  // Value in internal units regardless of the tag.
  double internal_x() const;
  bool operator==(const QuadratureSample&) const = default;
};

// p(x | theta) = sum_mn rho_mn e^{i(n-m)theta} psi_m(x) psi_n(x), internal
// units, clipped at zero.
class QuadratureDensity {
 public:
  QuadratureDensity(const DensityMatrix& rho, double theta);

  double operator()(double x) const;
  double theta() const { return theta_; }

 private:
  Eigen::MatrixXd kernel_;  // Re(rho_mn e^{i(n-m)theta}), symmetric
  double theta_;
};

QuadratureDensity quadrature_density(const DensityMatrix& rho, double theta);

struct PhaseSchedule {
  enum class Kind {
    kUniform,   // i.i.d. uniform on [0, 2pi)
    kTriangle,  // periodic triangle scan
    kSawtooth,  // periodic ramp
    kFixed,     // cycle through `fixed_phases`
  };
  Kind kind = Kind::kUniform;
  // Scan parameters: phase(i) = offset + amplitude * wave(i / period).
  double offset = 0.0;
  double amplitude = 2.0 * 3.14159265358979323846;
  double period_samples = 1.0e4;
  std::vector<double> fixed_phases;

  static PhaseSchedule uniform();
  static PhaseSchedule triangle(double offset, double amplitude, double period_samples);
  static PhaseSchedule sawtooth(double offset, double amplitude, double period_samples);
  static PhaseSchedule fixed(std::vector<double> phases);
};

struct SamplingOptions {
  int threads = 1;
  // Non-Gaussian states with continuously varying phase draw from inverse-CDF
  // tables on this many phases over [0, 2pi); the reported theta is the table
  // phase actually used.
  int phase_table_size = 2048;
  // Disables the closed-form Gaussian path.
  bool force_tabulated = false;
};

// Inverse-CDF tabulation over x in [-10, 10] (internal units).
inline constexpr double kTableHalfWidth = 10.0;
inline constexpr int kTablePoints = 20001;

// Phase-tagged quadrature samples in shot-noise units. Deterministic given
// `seed`, for any thread count.
std::vector<QuadratureSample> sample_quadratures(const DensityMatrix& rho,
                                                 const PhaseSchedule& schedule,
                                                 std::size_t count,
                                                 std::uint64_t seed,
                                                 const SamplingOptions& options = {});

// Closed-form variance in shot-noise units of squeezed vacuum after loss.
double gaussian_variance(const GaussianProvenance& g, double theta);

// Sample file: header "theta_rad,x_shotnoise" (or "theta_rad,x_vacuum_half")
// followed by one sample per line.
std::string samples_csv(std::span<const QuadratureSample> samples);
// Parses a sample file and converts values to internal units. Throws
// kParseError with the 1-based line number of the offending row.
std::vector<QuadratureSample> parse_samples_csv(std::string_view text);

}  // namespace homodyne

#endif  // HOMODYNE_QUADRATURE_H_
