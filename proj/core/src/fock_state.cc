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

#include "homodyne/fock_state.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "homodyne/error.h"
#include "json.hpp"

namespace homodyne {
namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-8;
constexpr double kEigenFloor = -1e-10;
constexpr double kMinKeptPopulation = 0.99;
constexpr int kMinWorkingCutoff = 20;
constexpr int kMaxWorkingCutoff = 400;

// Squeezed-vacuum amplitudes c_{2k} on levels 0..n_levels-1, unnormalised
// only through truncation. Uses the ratio c_{2k+2}/c_{2k} to avoid
// factorials.
Eigen::VectorXcd squeezed_amplitudes(int n_levels, const SqueezeParams& sq) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n_levels);
  const double t = std::tanh(sq.r);
  const std::complex<double> step =
      -std::polar(t, 2.0 * sq.theta_sq);
  std::complex<double> c = 1.0 / std::sqrt(std::cosh(sq.r));
  for (int k = 0; 2 * k < n_levels; ++k) {
    psi(2 * k) = c;
    c *= step * std::sqrt((2.0 * k + 1.0) * (2.0 * k + 2.0)) / (2.0 * (k + 1));
  }
  return psi;
}

}  // namespace

double shot_noise_to_internal(double x_shot_noise) {
  return x_shot_noise / std::sqrt(kShotNoiseVarianceScale);
}

double internal_to_shot_noise(double x_internal) {
  return x_internal * std::sqrt(kShotNoiseVarianceScale);
}

FockDim::FockDim(int cutoff) : cutoff_(cutoff) {
  if (cutoff < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "Fock cutoff must be at least 2, got " + std::to_string(cutoff));
  }
}

SqueezeParams::SqueezeParams(double r_in, double theta_in)
    : r(r_in), theta_sq(theta_in) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw Error(ErrorKind::kInvalidArgument, "squeezing parameter r must be >= 0");
  }
  const double two_pi = 2.0 * std::numbers::pi;
  theta_sq = std::fmod(theta_sq, two_pi);
  if (theta_sq < 0.0) theta_sq += two_pi;
}

DensityMatrix::DensityMatrix(FockDim dim, Eigen::MatrixXcd elements,
                             double truncation_leakage,
                             std::optional<GaussianProvenance> gaussian)
    : dim_(dim),
      elements_(std::move(elements)),
      truncation_leakage_(truncation_leakage),
      gaussian_(gaussian) {
  const int n = dim_.cutoff();
  if (elements_.rows() != n || elements_.cols() != n) {
    throw Error(ErrorKind::kInvalidState, "density matrix shape does not match cutoff");
  }
  if (!elements_.allFinite()) {
    throw Error(ErrorKind::kInvalidState, "density matrix has non-finite entries");
  }
  const double asym = (elements_ - elements_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTol) {
    throw Error(ErrorKind::kInvalidState, "density matrix is not Hermitian");
  }
  if (std::abs(trace() - 1.0) > kTraceTol) {
    throw Error(ErrorKind::kInvalidState,
                "density matrix trace " + std::to_string(trace()) + " is not 1");
  }
  if (min_eigenvalue() < kEigenFloor) {
    throw Error(ErrorKind::kInvalidState, "density matrix is not positive semidefinite");
  }
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(elements_,
                                                         Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DensityMatrix vacuum_state(FockDim dim) {
  return fock_state(dim, 0);
}

DensityMatrix fock_state(FockDim dim, int n) {
  if (n < 0 || n >= dim.cutoff()) {
    throw Error(ErrorKind::kInvalidArgument, "Fock level outside the truncated space");
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim.cutoff(), dim.cutoff());
  m(n, n) = 1.0;
  std::optional<GaussianProvenance> gaussian;
  if (n == 0) gaussian = GaussianProvenance{};
  return DensityMatrix(dim, std::move(m), 0.0, gaussian);
}

DensityMatrix maximally_mixed(FockDim dim) {
  const int n = dim.cutoff();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n) / static_cast<double>(n);
  return DensityMatrix(dim, std::move(m));
}

DensityMatrix squeezed_vacuum(FockDim dim, const SqueezeParams& sq) {
  const Eigen::VectorXcd psi = squeezed_amplitudes(dim.cutoff(), sq);
  const double kept = psi.squaredNorm();
  if (kept < kMinKeptPopulation) {
    throw Error(ErrorKind::kExcessiveTruncation,
                "squeezed vacuum with r=" + std::to_string(sq.r) + " keeps only " +
                    std::to_string(kept) + " of its population at cutoff " +
                    std::to_string(dim.cutoff()));
  }
  const Eigen::VectorXcd normed = psi / std::sqrt(kept);
  Eigen::MatrixXcd rho = normed * normed.adjoint();
  // Exact Hermiticity; the outer product can differ in the last bit.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(dim, std::move(rho), 1.0 - kept,
                       GaussianProvenance{sq.r, sq.theta_sq, 1.0});
}

DensityMatrix apply_loss(const DensityMatrix& rho, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw Error(ErrorKind::kInvalidEta,
                "transmissivity must lie in [0, 1], got " + std::to_string(eta));
  }
  const int n = rho.cutoff();
  // Pascal's triangle in doubles; exact for the cutoffs used here.
  std::vector<std::vector<double>> binom(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    binom[i][0] = 1.0;
    for (int k = 1; k <= i; ++k) {
      binom[i][k] = binom[i - 1][k - 1] + (k < i ? binom[i - 1][k] : 0.0);
    }
  }
  std::vector<double> loss_pow(n), keep_sqrt_pow(2 * n);
  for (int k = 0; k < n; ++k) loss_pow[k] = std::pow(1.0 - eta, k);
  for (int k = 0; k < 2 * n; ++k) keep_sqrt_pow[k] = std::pow(eta, 0.5 * k);

  const Eigen::MatrixXcd& in = rho.elements();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (int m = 0; m < n; ++m) {
    for (int l = 0; l < n; ++l) {
      std::complex<double> acc = 0.0;
      for (int k = 0; m + k < n && l + k < n; ++k) {
        const double w = std::sqrt(binom[m + k][k] * binom[l + k][k]) * loss_pow[k];
        acc += w * in(m + k, l + k);
      }
      out(m, l) = keep_sqrt_pow[m + l] * acc;
    }
  }
  std::optional<GaussianProvenance> gaussian = rho.gaussian();
  if (gaussian) gaussian->eta *= eta;
  return DensityMatrix(rho.dim(), std::move(out), rho.truncation_leakage(), gaussian);
}

DensityMatrix truncate(const DensityMatrix& rho, FockDim dim) {
  const int n = dim.cutoff();
  if (n > rho.cutoff()) {
    throw Error(ErrorKind::kInvalidArgument, "cannot truncate to a larger cutoff");
  }
  Eigen::MatrixXcd block = rho.elements().topLeftCorner(n, n);
  const double kept = block.trace().real();
  if (kept <= 0.0) {
    throw Error(ErrorKind::kExcessiveTruncation, "no population left after truncation");
  }
  block /= kept;
  const double leakage = 1.0 - (1.0 - rho.truncation_leakage()) * kept;
  return DensityMatrix(dim, std::move(block), leakage, rho.gaussian());
}

int working_cutoff(double r, int requested_cutoff) {
  int n = std::max(kMinWorkingCutoff, requested_cutoff);
  if (n % 2) ++n;
  const double t2 = std::tanh(r) * std::tanh(r);
  while (n < kMaxWorkingCutoff) {
    // Even-level populations shrink by at least tanh(r)^2 per step, so
    // P_n / (1 - tanh^2) bounds everything from level n upward.
    const Eigen::VectorXcd psi = squeezed_amplitudes(n + 1, SqueezeParams(r, 0.0));
    const double tail = std::norm(psi(n)) / std::max(1e-300, 1.0 - t2);
    if (tail < 1e-14) break;
    n += 2;
  }
  return n;
}

DensityMatrix lossy_squeezed_vacuum(FockDim dim, const SqueezeParams& sq,
                                    double eta) {
  const FockDim work(working_cutoff(sq.r, dim.cutoff()));
  return truncate(apply_loss(squeezed_vacuum(work, sq), eta), dim);
}

DensityMatrix rotate_phase(const DensityMatrix& rho, double phi) {
  const int n = rho.cutoff();
  Eigen::MatrixXcd out(n, n);
  for (int m = 0; m < n; ++m) {
    for (int l = 0; l < n; ++l) {
      out(m, l) = rho(m, l) * std::polar(1.0, -phi * (m - l));
    }
  }
  std::optional<GaussianProvenance> gaussian = rho.gaussian();
  if (gaussian) {
    // Minimum-variance direction moves from theta_sq to theta_sq - phi.
    gaussian->theta_sq = SqueezeParams(gaussian->r, gaussian->theta_sq - phi).theta_sq;
  }
  return DensityMatrix(rho.dim(), std::move(out), rho.truncation_leakage(), gaussian);
}

QuadratureMoments quadrature_moments(const DensityMatrix& rho, double theta) {
  const int n = rho.cutoff();
  std::complex<double> a_mean = 0.0, a_sq_mean = 0.0;
  double number_mean = 0.0;
  for (int k = 1; k < n; ++k) {
    a_mean += std::sqrt(static_cast<double>(k)) * rho(k, k - 1);
    number_mean += k * rho(k, k).real();
  }
  for (int k = 2; k < n; ++k) {
    a_sq_mean += std::sqrt(static_cast<double>(k) * (k - 1)) * rho(k, k - 2);
  }
  const double norm = rho.trace();
  a_mean /= norm;
  a_sq_mean /= norm;
  number_mean /= norm;

  const std::complex<double> rot = std::polar(1.0, -theta);
  const double x_mean = std::sqrt(2.0) * (a_mean * rot).real();
  const double x_sq_mean = (a_sq_mean * rot * rot).real() + number_mean + 0.5;
  return {internal_to_shot_noise(x_mean),
          kShotNoiseVarianceScale * (x_sq_mean - x_mean * x_mean)};
}

std::string to_json(const DensityMatrix& rho) {
  const int n = rho.cutoff();
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int m = 0; m < n; ++m) {
    nlohmann::json re_row = nlohmann::json::array(), im_row = nlohmann::json::array();
    for (int l = 0; l < n; ++l) {
      re_row.push_back(rho(m, l).real());
      im_row.push_back(rho(m, l).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  nlohmann::ordered_json out;
  out["cutoff"] = n;
  out["re"] = std::move(re);
  out["im"] = std::move(im);
  return out.dump();
}

DensityMatrix density_matrix_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParseError, std::string("density matrix JSON: ") + e.what());
  }
  try {
    const int n = doc.at("cutoff").get<int>();
    const auto& re = doc.at("re");
    const auto& im = doc.at("im");
    if (re.size() != static_cast<std::size_t>(n) || im.size() != static_cast<std::size_t>(n)) {
      throw Error(ErrorKind::kParseError, "density matrix JSON: row count != cutoff");
    }
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) {
      if (re[i].size() != static_cast<std::size_t>(n) ||
          im[i].size() != static_cast<std::size_t>(n)) {
        throw Error(ErrorKind::kParseError, "density matrix JSON: ragged row");
      }
      for (int j = 0; j < n; ++j) {
        m(i, j) = {re[i][j].get<double>(), im[i][j].get<double>()};
      }
    }
    return DensityMatrix(FockDim(n), std::move(m));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("density matrix JSON: ") + e.what());
  }
}

}  // namespace homodyne
