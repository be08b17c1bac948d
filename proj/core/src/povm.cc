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

#include "homodyne/povm.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "homodyne/error.h"
#include "homodyne/quadrature.h"

namespace homodyne {
namespace {

constexpr double kIntegrationLimit = 20.0;
constexpr double kMaxPanel = 0.1;
constexpr double kCompletenessTol = 1e-4;

using Gauss = boost::math::quadrature::gauss<double, 20>;

// int_a^b psi_m psi_n dx for all m, n < cutoff.
Eigen::MatrixXd overlap(int cutoff, double a, double b) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(cutoff, cutoff);
  if (!(b > a)) return acc;
  const auto& nodes = Gauss::abscissa();
  const auto& weights = Gauss::weights();
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / kMaxPanel)));
  const double width = (b - a) / panels;
  Eigen::VectorXd psi(cutoff);
  auto add_node = [&](double x, double w) {
    fock_wavefunctions(x, std::span<double>(psi.data(), cutoff));
    acc.noalias() += w * psi * psi.transpose();
  };
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * width;
    const double mid = lo + 0.5 * width, half = 0.5 * width;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i] == 0.0) {
        add_node(mid, half * weights[i]);
      } else {
        add_node(mid - half * nodes[i], half * weights[i]);
        add_node(mid + half * nodes[i], half * weights[i]);
      }
    }
  }
  return acc;
}

}  // namespace

HomodynePovm::HomodynePovm(FockDim dim, std::vector<double> edges,
                           std::vector<double> phases,
                           std::vector<Eigen::MatrixXd> bin_overlaps)
    : dim_(dim),
      edges_(std::move(edges)),
      phases_(std::move(phases)),
      overlaps_(std::move(bin_overlaps)) {
  if (overlaps_.size() != n_bins()) {
    throw Error(ErrorKind::kInvalidArgument, "POVM overlap count does not match bins");
  }
}

Eigen::MatrixXcd HomodynePovm::element(std::size_t phase, std::size_t bin) const {
  const int n = dim_.cutoff();
  const double theta = phases_.at(phase);
  const Eigen::MatrixXd& o = overlaps_.at(bin);
  Eigen::MatrixXcd out(n, n);
  for (int m = 0; m < n; ++m) {
    for (int l = 0; l < n; ++l) out(m, l) = o(m, l) * std::polar(1.0, (m - l) * theta);
  }
  return out;
}

double HomodynePovm::probability(const Eigen::MatrixXcd& rho, std::size_t phase,
                                 std::size_t bin) const {
  const int n = dim_.cutoff();
  const double theta = phases_[phase];
  const Eigen::MatrixXd& o = overlaps_[bin];
  double p = 0.0;
  for (int m = 0; m < n; ++m) {
    p += rho(m, m).real() * o(m, m);
    for (int l = m + 1; l < n; ++l) {
      // rho_{lm} Pi_{ml} + rho_{ml} Pi_{lm} = 2 Re(rho_{lm} Pi_{ml}).
      p += 2.0 * o(m, l) * (rho(l, m) * std::polar(1.0, (m - l) * theta)).real();
    }
  }
  return p;
}

double HomodynePovm::completeness_residual() const {
  const int n = dim_.cutoff();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  for (const auto& o : overlaps_) sum += o;
  // Phase factors multiply every element of Pi(theta, .) identically, so the
  // residual of the phase-free sum bounds all phases.
  return (sum - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

HomodynePovm build_povm(FockDim dim, std::vector<double> edges,
                        std::vector<double> phases) {
  if (phases.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "POVM needs at least one phase");
  }
  if (!std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw Error(ErrorKind::kInvalidArgument, "bin edges must be strictly increasing");
  }
  for (double e : edges) {
    if (!(std::abs(e) < kIntegrationLimit)) {
      throw Error(ErrorKind::kInvalidArgument, "bin edge outside |x| < 20");
    }
  }
  const int n = dim.cutoff();
  std::vector<Eigen::MatrixXd> overlaps;
  overlaps.reserve(edges.size() + 1);
  double lo = -kIntegrationLimit;
  for (double e : edges) {
    overlaps.push_back(overlap(n, lo, e));
    lo = e;
  }
  overlaps.push_back(overlap(n, lo, kIntegrationLimit));

  HomodynePovm povm(dim, std::move(edges), std::move(phases), std::move(overlaps));
  const double residual = povm.completeness_residual();
  if (residual > kCompletenessTol) {
    throw Error(ErrorKind::kIncompletePovm,
                "POVM completeness residual " + std::to_string(residual));
  }
  return povm;
}

std::vector<double> default_bin_edges(double sigma_max, int n_inner_bins) {
  if (!(sigma_max > 0.0) || n_inner_bins < 1) {
    throw Error(ErrorKind::kInvalidArgument, "invalid default binning parameters");
  }
  const double half = 5.0 * sigma_max;
  std::vector<double> edges(n_inner_bins + 1);
  for (int i = 0; i <= n_inner_bins; ++i) {
    edges[i] = -half + 2.0 * half * i / n_inner_bins;
  }
  return edges;
}

std::vector<double> uniform_phases(int n_phases) {
  if (n_phases < 1) throw Error(ErrorKind::kInvalidArgument, "need at least one phase");
  std::vector<double> out(n_phases);
  for (int i = 0; i < n_phases; ++i) out[i] = std::numbers::pi * i / n_phases;
  return out;
}

}  // namespace homodyne
