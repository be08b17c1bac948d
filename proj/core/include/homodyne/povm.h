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

#ifndef HOMODYNE_POVM_H_
#define HOMODYNE_POVM_H_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "homodyne/fock_state.h"

namespace homodyne {

// Binned homodyne measurement on a truncated Fock space.
//
// For phase theta and bin [a, b) the element is
//   <m|Pi|n> = e^{i(m-n)theta} int_a^b psi_m(x) psi_n(x) dx,
// so Tr(rho Pi) is the probability that x_theta falls in the bin. The bin
// list is (-inf, e_0), [e_0, e_1), ..., [e_{K-1}, +inf): `edges.size() + 1`
// bins per phase, overflow included. Edges are in internal units.
class HomodynePovm {
 public:
  HomodynePovm(FockDim dim, std::vector<double> edges, std::vector<double> phases,
               std::vector<Eigen::MatrixXd> bin_overlaps);

  FockDim dim() const { return dim_; }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& phases() const { return phases_; }
  std::size_t n_bins() const { return edges_.size() + 1; }
  std::size_t n_phases() const { return phases_.size(); }
  std::size_t n_outcomes() const { return n_bins() * n_phases(); }
  std::size_t outcome_index(std::size_t phase, std::size_t bin) const {
    return phase * n_bins() + bin;
  }

  // Phase-independent real overlaps int_bin psi_m psi_n.
  const Eigen::MatrixXd& bin_overlap(std::size_t bin) const { return overlaps_[bin]; }

  Eigen::MatrixXcd element(std::size_t phase, std::size_t bin) const;

  // Tr(rho Pi(phase, bin)).
  double probability(const Eigen::MatrixXcd& rho, std::size_t phase,
                     std::size_t bin) const;

  // max |sum_bins Pi(theta, .) - I| over all phases.
  double completeness_residual() const;

 private:
  FockDim dim_;
  std::vector<double> edges_;
  std::vector<double> phases_;
  std::vector<Eigen::MatrixXd> overlaps_;
};

// Overlap integrals are computed with composite 20-point Gauss-Legendre
// quadrature on panels no wider than 0.1; the overflow bins are integrated
// out to |x| = 20. Throws kIncompletePovm if completeness fails by > 1e-4.
HomodynePovm build_povm(FockDim dim, std::vector<double> edges,
                        std::vector<double> phases);

// 101 uniform bins over [-5 sigma_max, 5 sigma_max] (internal units) plus
// overflow, and `n_phases` uniform phases over [0, pi).
std::vector<double> default_bin_edges(double sigma_max, int n_inner_bins = 101);
std::vector<double> uniform_phases(int n_phases = 60);

}  // namespace homodyne

#endif  // HOMODYNE_POVM_H_
