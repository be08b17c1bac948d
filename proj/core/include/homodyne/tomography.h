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

#ifndef HOMODYNE_TOMOGRAPHY_H_
#define HOMODYNE_TOMOGRAPHY_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homodyne/fock_state.h"
#include "homodyne/povm.h"
#include "homodyne/quadrature.h"
#include "homodyne/wigner.h"

namespace homodyne {

// Histogram of phase-tagged quadrature samples on a POVM's phase and bin
// grid. Counts are stored row-major by phase.
class BinnedData {
 public:
  // Throws kInvalidArgument if counts.size() != phases * (edges + 1).
  BinnedData(std::vector<double> phases, std::vector<double> edges,
             std::vector<std::uint64_t> counts);

  const std::vector<double>& phases() const { return phases_; }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::size_t n_phases() const { return phases_.size(); }
  std::size_t n_bins() const { return edges_.size() + 1; }
  std::uint64_t count(std::size_t phase, std::size_t bin) const {
    return counts_[phase * n_bins() + bin];
  }
  std::uint64_t total() const;
  // Number of phases with at least one count.
  std::size_t populated_phases() const;

 private:
  std::vector<double> phases_;
  std::vector<double> edges_;
  std::vector<std::uint64_t> counts_;
};

// Assigns each sample to the nearest POVM phase. A sample at theta may be
// folded onto theta - pi with its quadrature sign flipped, since
// x_{theta+pi} = -x_theta. Throws kPhaseGridTooCoarse if a sample lies more
// than pi / (2 n_phases) from every grid phase.
BinnedData bin_samples(std::span<const QuadratureSample> samples, const HomodynePovm& povm);

struct MleOptions {
  double tolerance = 1e-7;  // max |delta rho| elementwise
  int max_iterations = 2000;
  double probability_floor = 1e-12;
  double monotonic_slack = 1e-10;
  int threads = 1;
  std::uint64_t seed = 0;  // recorded for provenance only
  // Called after every iteration with (iteration, log-likelihood, delta).
  std::function<void(int, double, double)> progress;
};

struct MleReport {
  DensityMatrix rho;
  int iterations = 0;
  std::vector<double> log_likelihood{};  // after each iteration
  double final_delta = 0.0;
  bool converged = false;
  std::uint64_t seed = 0;
  std::size_t zero_probability_events = 0;
  // Iterations where the plain R rho R step lowered the likelihood and a
  // damped step (I + eps R) rho (I + eps R) was taken instead.
  int diluted_steps = 0;
};

// Iterative maximum-likelihood reconstruction, rho <- N[R rho R] with
// R = sum_j (f_j / p_j) Pi_j, started from the maximally mixed state.
// The accumulation of R is split by phase and summed in a fixed order, so
// the result does not depend on `threads`. Throws kInvalidArgument for empty
// data or a grid that differs from the POVM's.
MleReport mle_reconstruct(const BinnedData& data, const HomodynePovm& povm,
                          const MleOptions& options = {});

// Log-likelihood sum_j n_j ln p_j of `rho` (probabilities floored).
double log_likelihood(const BinnedData& data, const HomodynePovm& povm,
                      const Eigen::MatrixXcd& rho, double floor = 1e-12);

std::string mle_report_json(const MleReport& report);

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0, 1].
// Throws kInvalidArgument if dimensions differ.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// ---------------------------------------------------------------------------
// Phase scans

// Maps the phase-shifter drive voltage to optical LO phase,
// theta = offset + slope * v.
struct PhaseCalibration {
  double offset_rad = 0.0;
  double rad_per_volt = 1.0;
  double phase(double volts) const { return offset_rad + rad_per_volt * volts; }
};

struct ScanRecord {
  double time_s = 0.0;
  double drive_v = 0.0;
  double x = 0.0;  // shot-noise units
};

struct ScanSettings {
  double drive_hz = 100.0;  // triangle drive
  double v_low = 0.0;
  double v_high = 1.0;
  double sample_rate_hz = 1.0e6;
};

// Time-tagged samples of `rho` under a triangle-wave phase drive.
std::vector<ScanRecord> simulate_phase_scan(const DensityMatrix& rho, const ScanSettings& scan,
                                            const PhaseCalibration& calibration,
                                            std::size_t count, std::uint64_t seed,
                                            int threads = 1);

// Fits an affine calibration from the variance-versus-voltage trace by
// least squares of V(v) = c0 + c1 cos(k v) + c2 sin(k v) over k, placing
// theta = 0 at the variance minimum. The sign of the slope cannot be
// recovered from variances and is taken positive. Throws
// kInsufficientPoints if the trace does not span a full variance period.
PhaseCalibration fit_phase_calibration(std::span<const ScanRecord> records,
                                       int voltage_bins = 200);

struct ScanReconstructionOptions {
  int cutoff = 6;
  int n_phases = 60;
  int n_inner_bins = 101;
  int wigner_points = 201;
  MleOptions mle;
};

struct ScanReconstruction {
  MleReport report;
  WignerGrid wigner{};
  // 1/e contour levels: peak/e of the reconstruction and (1/pi)/e for the
  // vacuum overlay.
  double squeezed_contour_level = 0.0;
  double vacuum_contour_level = 0.0;
  ContourAxes squeezed_axes{};
  std::vector<std::string> warnings{};
};

// Calibrates phases, bins on a uniform POVM covering the data, runs the
// reconstruction and evaluates the Wigner function. Data from a single LO
// phase produce a warning and an unconstrained phase reference, not an error.
ScanReconstruction reconstruct_from_scan(std::span<const ScanRecord> records,
                                         const PhaseCalibration& calibration,
                                         const ScanReconstructionOptions& options = {});

// Same pipeline for samples whose phases are already known.
ScanReconstruction reconstruct_samples(std::span<const QuadratureSample> samples,
                                       const ScanReconstructionOptions& options = {});

std::string scan_records_csv(std::span<const ScanRecord> records);
// Header "time_s,drive_v,x_shotnoise"; throws kParseError with line number.
std::vector<ScanRecord> parse_scan_records_csv(std::string_view text);

}  // namespace homodyne

#endif  // HOMODYNE_TOMOGRAPHY_H_
