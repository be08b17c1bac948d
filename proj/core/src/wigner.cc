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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include "homodyne/error.h"

namespace homodyne {
namespace {

// Precomputed sqrt(n!/(n+k)!) for all (n, k) with n + k < cutoff.
Eigen::MatrixXd factorial_ratios(int cutoff) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(cutoff, cutoff);
  for (int n = 0; n < cutoff; ++n) {
    for (int k = 0; n + k < cutoff; ++k) {
      out(n, k) = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(n + k + 1.0)));
    }
  }
  return out;
}

// Sum over rho_{mn} W_{|m><n|}(x, p) with the Laguerre closed form
//   W_{|n+k><n|} = (-1)^n / pi sqrt(n!/(n+k)!) (sqrt2 (x - ip))^k
//                  exp(-(x^2+p^2)) L_n^(k)(2(x^2+p^2)).
double wigner_sum(const Eigen::MatrixXcd& rho, const Eigen::MatrixXd& ratios,
                  double x, double p) {
  const int cutoff = static_cast<int>(rho.rows());
  const double s = x * x + p * p;
  const double u = 2.0 * s;
  const std::complex<double> zc = std::sqrt(2.0) * std::complex<double>(x, -p);
  std::complex<double> zc_pow = 1.0;
  double total = 0.0;
  for (int k = 0; k < cutoff; ++k) {
    // L_n^(k)(u) by the three-term recurrence in n.
    double l_prev = 0.0, l_cur = 1.0;
    std::complex<double> acc = 0.0;
    for (int n = 0; n + k < cutoff; ++n) {
      if (n > 0) {
        const double l_next =
            ((2.0 * (n - 1) + 1.0 + k - u) * l_cur - (n - 1.0 + k) * l_prev) / n;
        l_prev = l_cur;
        l_cur = l_next;
      }
      const double sign = (n % 2) ? -1.0 : 1.0;
      acc += rho(n + k, n) * (sign * ratios(n, k) * l_cur);
    }
    const double weight = (k == 0) ? 1.0 : 2.0;
    total += weight * (acc * zc_pow).real();
    zc_pow *= zc;
  }
  return total * std::exp(-s) / std::numbers::pi;
}

}  // namespace

WignerGridSpec WignerGridSpec::covering(const DensityMatrix& rho, double sigmas,
                                        int points) {
  double widest = 0.0;
  for (int i = 0; i < 32; ++i) {
    const double theta = std::numbers::pi * i / 32.0;
    widest = std::max(widest, quadrature_moments(rho, theta).variance);
  }
  const double sigma = std::sqrt(widest / kShotNoiseVarianceScale);
  const double half = sigmas * sigma;
  WignerGridSpec spec;
  spec.x_min = spec.p_min = -half;
  spec.x_max = spec.p_max = half;
  spec.nx = spec.np = points;
  return spec;
}

double WignerGrid::integral() const {
  const std::size_t nx = x_axis.size(), np = p_axis.size();
  if (nx < 2 || np < 2) return 0.0;
  const double dx = x_axis[1] - x_axis[0];
  const double dp = p_axis[1] - p_axis[0];
  double sum = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    const double wi = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
    for (std::size_t j = 0; j < np; ++j) {
      const double wj = (j == 0 || j == np - 1) ? 0.5 : 1.0;
      sum += wi * wj * values(i, j);
    }
  }
  return sum * dx * dp;
}

std::vector<double> WignerGrid::x_marginal() const {
  const std::size_t nx = x_axis.size(), np = p_axis.size();
  std::vector<double> out(nx, 0.0);
  if (np < 2) return out;
  const double dp = p_axis[1] - p_axis[0];
  for (std::size_t i = 0; i < nx; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
      sum += ((j == 0 || j == np - 1) ? 0.5 : 1.0) * values(i, j);
    }
    out[i] = sum * dp;
  }
  return out;
}

double wigner_at(const DensityMatrix& rho, double x, double p) {
  return wigner_sum(rho.elements(), factorial_ratios(rho.cutoff()), x, p);
}

WignerGrid wigner(const DensityMatrix& rho, const WignerGridSpec& spec) {
  if (spec.nx < 2 || spec.np < 2 || !(spec.x_max > spec.x_min) ||
      !(spec.p_max > spec.p_min)) {
    throw Error(ErrorKind::kInvalidArgument, "degenerate Wigner grid");
  }
  const Eigen::MatrixXd ratios = factorial_ratios(rho.cutoff());
  WignerGrid grid;
  grid.x_axis.resize(spec.nx);
  grid.p_axis.resize(spec.np);
  for (int i = 0; i < spec.nx; ++i) {
    grid.x_axis[i] = spec.x_min + (spec.x_max - spec.x_min) * i / (spec.nx - 1);
  }
  for (int j = 0; j < spec.np; ++j) {
    grid.p_axis[j] = spec.p_min + (spec.p_max - spec.p_min) * j / (spec.np - 1);
  }
  grid.values.resize(spec.nx, spec.np);
  for (int i = 0; i < spec.nx; ++i) {
    for (int j = 0; j < spec.np; ++j) {
      grid.values(i, j) =
          wigner_sum(rho.elements(), ratios, grid.x_axis[i], grid.p_axis[j]);
    }
  }
  grid.peak = grid.values.maxCoeff();
  grid.one_over_e_level = grid.peak / std::numbers::e;
  return grid;
}

ContourAxes contour_axes(const DensityMatrix& rho, double level, double x0,
                         double p0, int n_angles) {
  const Eigen::MatrixXd ratios = factorial_ratios(rho.cutoff());
  auto w = [&](double x, double p) {
    return wigner_sum(rho.elements(), ratios, x, p);
  };
  if (w(x0, p0) <= level) {
    throw Error(ErrorKind::kInvalidArgument, "contour level is above the centre value");
  }
  constexpr double kStep = 0.02;
  constexpr double kMaxRadius = 30.0;
  auto crossing = [&](double dx, double dp) {
    double inside = 0.0, outside = kStep;
    while (w(x0 + outside * dx, p0 + outside * dp) > level) {
      inside = outside;
      outside += kStep;
      if (outside > kMaxRadius) {
        throw Error(ErrorKind::kInvalidArgument, "contour does not close on the grid");
      }
    }
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (inside + outside);
      if (w(x0 + mid * dx, p0 + mid * dp) > level) {
        inside = mid;
      } else {
        outside = mid;
      }
    }
    return 0.5 * (inside + outside);
  };

  ContourAxes axes;
  axes.semi_minor = kMaxRadius;
  for (int a = 0; a < n_angles; ++a) {
    const double phi = std::numbers::pi * a / n_angles;
    const double c = std::cos(phi), s = std::sin(phi);
    const double half_width = 0.5 * (crossing(c, s) + crossing(-c, -s));
    if (half_width > axes.semi_major) {
      axes.semi_major = half_width;
      axes.major_angle = phi;
    }
    axes.semi_minor = std::min(axes.semi_minor, half_width);
  }
  return axes;
}

ContourAxes one_over_e_axes(const DensityMatrix& rho, const WignerGrid& grid) {
  Eigen::Index i = 0, j = 0;
  grid.values.maxCoeff(&i, &j);
  return contour_axes(rho, grid.one_over_e_level, grid.x_axis[i], grid.p_axis[j]);
}

std::string wigner_csv(const WignerGrid& grid) {
  std::string out = "x_vacuum_half_units,p_vacuum_half_units,wigner_per_unit_area\n";
  char line[96];
  for (std::size_t i = 0; i < grid.x_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.p_axis.size(); ++j) {
      std::snprintf(line, sizeof(line), "%.10g,%.10g,%.12g\n", grid.x_axis[i],
                    grid.p_axis[j], grid.values(i, j));
      out += line;
    }
  }
  return out;
}

}  // namespace homodyne
