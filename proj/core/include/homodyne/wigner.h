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

#ifndef HOMODYNE_WIGNER_H_
#define HOMODYNE_WIGNER_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "homodyne/fock_state.h"

namespace homodyne {

struct WignerGridSpec {
  double x_min = -5.0, x_max = 5.0;
  int nx = 201;
  double p_min = -5.0, p_max = 5.0;
  int np = 201;

  // Square grid spanning `sigmas` standard deviations of the widest
  // quadrature of `rho` (internal units).
  static WignerGridSpec covering(const DensityMatrix& rho, double sigmas = 6.0,
                                 int points = 201);
};

// W(x, p) on a rectangular grid, internal units (vacuum variance 1/2), so
// that the vacuum is exp(-x^2 - p^2) / pi.
struct WignerGrid {
  std::vector<double> x_axis;
  std::vector<double> p_axis;
  Eigen::MatrixXd values;     // values(i, j) = W(x_axis[i], p_axis[j])
  double peak = 0.0;
  double one_over_e_level = 0.0;  // peak / e

  double integral() const;  // trapezoidal rule
  // Marginal over p at each x (trapezoidal rule).
  std::vector<double> x_marginal() const;
};

double wigner_at(const DensityMatrix& rho, double x, double p);

WignerGrid wigner(const DensityMatrix& rho, const WignerGridSpec& spec);

struct ContourAxes {
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double major_angle = 0.0;  // direction of the major axis, radians in [0, pi)
  double ratio() const { return semi_major / semi_minor; }
};

// Semi-axes of the level set W = level around (x0, p0), found by radial
// root bracketing over `n_angles` directions in [0, pi).
ContourAxes contour_axes(const DensityMatrix& rho, double level,
                         double x0 = 0.0, double p0 = 0.0, int n_angles = 360);

// Axes of the 1/e contour of the grid peak.
ContourAxes one_over_e_axes(const DensityMatrix& rho, const WignerGrid& grid);

// Plot-ready (x, p, W) triplets under a units-tagged header line.
std::string wigner_csv(const WignerGrid& grid);

}  // namespace homodyne

#endif  // HOMODYNE_WIGNER_H_
