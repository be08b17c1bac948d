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

#include "homodyne/wigner.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "homodyne/quadrature.h"
#include "test_util.h"

namespace homodyne {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Wigner, VacuumIsGaussian) {
  const auto rho = vacuum_state(FockDim(4));
  for (double x : {0.0, 0.5, -1.2}) {
    for (double p : {0.0, 0.7}) {
      EXPECT_NEAR(wigner_at(rho, x, p), std::exp(-x * x - p * p) / kPi, 1e-15);
    }
  }
}

TEST(Wigner, SinglePhotonIsNegativeAtOrigin) {
  const auto rho = fock_state(FockDim(3), 1);
  EXPECT_NEAR(wigner_at(rho, 0.0, 0.0), -1.0 / kPi, 1e-15);
  // W_1 = (2(x^2+p^2) - 1) e^{-(x^2+p^2)} / pi.
  EXPECT_NEAR(wigner_at(rho, 0.6, -0.3), (2 * 0.45 - 1) * std::exp(-0.45) / kPi, 1e-15);
}

TEST(Wigner, SqueezedStateIsGaussianWithQuadratureVariances) {
  const double r = 0.375, eta = 0.28;
  const auto rho = lossy_squeezed_vacuum(FockDim(30), SqueezeParams(r, 0.0), eta);
  const double vx = (eta * std::exp(-2 * r) + 1 - eta) / 2;
  const double vp = (eta * std::exp(2 * r) + 1 - eta) / 2;
  for (double x : {0.0, 0.4, -0.9}) {
    for (double p : {0.0, 0.3, 1.1}) {
      const double expected = std::exp(-x * x / (2 * vx) - p * p / (2 * vp)) /
                              (2 * kPi * std::sqrt(vx * vp));
      EXPECT_NEAR(wigner_at(rho, x, p), expected, 1e-12);
    }
  }
}

TEST(Wigner, MarginalsReproduceQuadratureDensities) {
  // (|0> + i|1>)/sqrt2 breaks the x <-> p symmetry and fixes the p sign.
  Eigen::MatrixXcd m(3, 3);
  m.setZero();
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  m(1, 0) = std::complex<double>(0, 0.5);
  m(0, 1) = std::complex<double>(0, -0.5);
  const DensityMatrix rho(FockDim(3), m);
  WignerGridSpec spec;
  spec.x_min = spec.p_min = -7.0;
  spec.x_max = spec.p_max = 7.0;
  spec.nx = spec.np = 281;
  const auto grid = wigner(rho, spec);
  const auto marginal_x = grid.x_marginal();
  const auto px = quadrature_density(rho, 0.0);
  for (std::size_t i = 0; i < grid.x_axis.size(); i += 20) {
    EXPECT_NEAR(marginal_x[i], px(grid.x_axis[i]), 1e-9);
  }
  // p marginal by direct summation against the theta = pi/2 density.
  const auto pp = quadrature_density(rho, kPi / 2);
  const double dx = grid.x_axis[1] - grid.x_axis[0];
  for (std::size_t j = 0; j < grid.p_axis.size(); j += 20) {
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.x_axis.size(); ++i) {
      const double w = (i == 0 || i + 1 == grid.x_axis.size()) ? 0.5 : 1.0;
      sum += w * grid.values(i, j);
    }
    EXPECT_NEAR(sum * dx, pp(grid.p_axis[j]), 1e-9) << grid.p_axis[j];
  }
}

TEST(Wigner, GridIntegratesToOne) {
  const auto rho = lossy_squeezed_vacuum(FockDim(8), SqueezeParams(0.375, 0.6), 0.28);
  const auto grid = wigner(rho, WignerGridSpec::covering(rho));
  EXPECT_NEAR(grid.integral(), 1.0, 1e-6);
  EXPECT_NEAR(grid.one_over_e_level, grid.peak / std::numbers::e, 1e-15);
}

TEST(Wigner, ContourAxesOfSqueezedState) {
  const double r = 0.375, eta = 0.28, theta = 0.5;
  const auto rho = lossy_squeezed_vacuum(FockDim(30), SqueezeParams(r, theta), eta);
  const double v_min = eta * std::exp(-2 * r) + 1 - eta;
  const double v_max = eta * std::exp(2 * r) + 1 - eta;
  const double peak = wigner_at(rho, 0.0, 0.0);
  const auto axes = contour_axes(rho, peak / std::numbers::e);
  // For a Gaussian the 1/e contour has semi-axes sqrt(2) sigma (internal units).
  EXPECT_NEAR(axes.semi_major, std::sqrt(v_max), 1e-3);
  EXPECT_NEAR(axes.semi_minor, std::sqrt(v_min), 1e-3);
  EXPECT_NEAR(axes.ratio(), std::sqrt(v_max / v_min), 2e-3);
  EXPECT_NEAR(axes.major_angle, theta + kPi / 2, 0.01);
}

TEST(Wigner, VacuumContourIsCircle) {
  const auto rho = vacuum_state(FockDim(3));
  const auto axes = contour_axes(rho, 1.0 / (kPi * std::numbers::e));
  EXPECT_NEAR(axes.semi_major, 1.0, 1e-6);
  EXPECT_NEAR(axes.semi_minor, 1.0, 1e-6);
}

TEST(Wigner, CsvHasUnitHeader) {
  WignerGridSpec spec;
  spec.nx = spec.np = 3;
  const auto csv = wigner_csv(wigner(vacuum_state(FockDim(2)), spec));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "x_vacuum_half_units,p_vacuum_half_units,wigner_per_unit_area");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
}

TEST(Wigner, RejectsContourAboveCentre) {
  const auto rho = vacuum_state(FockDim(3));
  EXPECT_TRUE(testing::raises(ErrorKind::kInvalidArgument, [&] { contour_axes(rho, 1.0); }));
}

}  // namespace
}  // namespace homodyne
