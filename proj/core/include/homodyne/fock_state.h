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

#ifndef HOMODYNE_FOCK_STATE_H_
#define HOMODYNE_FOCK_STATE_H_

#include <complex>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace homodyne {

// Phase-space convention: hbar = 1, x = (a + a^dag)/sqrt(2), so the vacuum
// has quadrature variance 1/2. Everything reported outside the library is in
// shot-noise units, where the vacuum variance is 1. This is the only place
// the conversion lives.
inline constexpr double kShotNoiseVarianceScale = 2.0;

// Amplitude conversion derived from the variance scale.
double shot_noise_to_internal(double x_shot_noise);
double internal_to_shot_noise(double x_internal);

// Number of Fock levels kept; the space spans photon numbers 0..cutoff-1.
class FockDim {
 public:
  explicit FockDim(int cutoff);
  int cutoff() const { return cutoff_; }
  bool operator==(const FockDim&) const = default;

 private:
  int cutoff_;
};

struct SqueezeParams {
  double r = 0.0;         // squeezing parameter
  double theta_sq = 0.0;  // quadrature angle of minimum variance, [0, 2pi)

  SqueezeParams() = default;
  SqueezeParams(double r_in, double theta_in);
};

// Parameters of a zero-mean single-mode Gaussian state that the sampler can
// use for its closed-form path: squeezed vacuum followed by loss.
struct GaussianProvenance {
  double r = 0.0;
  double theta_sq = 0.0;
  double eta = 1.0;
};

class DensityMatrix {
 public:
  // Validates Hermiticity, trace and positivity. `truncation_leakage` is the
  // trace deficit the state had before it was renormalised.
  DensityMatrix(FockDim dim, Eigen::MatrixXcd elements,
                double truncation_leakage = 0.0,
                std::optional<GaussianProvenance> gaussian = std::nullopt);

  FockDim dim() const { return dim_; }
  int cutoff() const { return dim_.cutoff(); }
  const Eigen::MatrixXcd& elements() const { return elements_; }
  std::complex<double> operator()(int m, int n) const { return elements_(m, n); }
  double trace() const { return elements_.trace().real(); }
  double truncation_leakage() const { return truncation_leakage_; }
  const std::optional<GaussianProvenance>& gaussian() const { return gaussian_; }
  double min_eigenvalue() const;

 private:
  FockDim dim_;
  Eigen::MatrixXcd elements_;
  double truncation_leakage_;
  std::optional<GaussianProvenance> gaussian_;
};

DensityMatrix vacuum_state(FockDim dim);
DensityMatrix fock_state(FockDim dim, int n);
DensityMatrix maximally_mixed(FockDim dim);

// Pure squeezed vacuum, truncated to `dim` and renormalised. Throws
// kExcessiveTruncation if less than 99% of the population fits in `dim`.
DensityMatrix squeezed_vacuum(FockDim dim, const SqueezeParams& sq);

// Exact pure-loss channel (beamsplitter with transmissivity eta) as a Kraus
// sum in the Fock basis. Throws kInvalidEta outside [0, 1].
DensityMatrix apply_loss(const DensityMatrix& rho, double eta);

// Keeps levels 0..dim-1 and renormalises; the dropped population is added
// to the recorded leakage.
DensityMatrix truncate(const DensityMatrix& rho, FockDim dim);

// Smallest even cutoff >= 20 whose squeezed-vacuum tail is below 1e-14.
int working_cutoff(double r, int requested_cutoff);

// Squeezed vacuum built at the working cutoff, sent through loss eta, then
// truncated to `dim`.
DensityMatrix lossy_squeezed_vacuum(FockDim dim, const SqueezeParams& sq,
                                    double eta);

// U rho U^dag with U = exp(-i phi n).
DensityMatrix rotate_phase(const DensityMatrix& rho, double phi);

struct QuadratureMoments {
  double mean = 0.0;      // shot-noise units (amplitude)
  double variance = 0.0;  // shot-noise units, vacuum = 1
};

// Moments of x_theta = x cos(theta) + p sin(theta).
QuadratureMoments quadrature_moments(const DensityMatrix& rho, double theta);

// {cutoff, re[][], im[][]} with row-major matrices.
std::string to_json(const DensityMatrix& rho);
DensityMatrix density_matrix_from_json(std::string_view json);

}  // namespace homodyne

#endif  // HOMODYNE_FOCK_STATE_H_
