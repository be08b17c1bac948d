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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "test_util.h"

namespace homodyne {
namespace {

using testing::raises;

// Simpson's rule on [-a, a].
template <typename F>
double integrate(F f, double a = 14.0, int n = 28000) {
  const double h = 2.0 * a / n;
  double sum = f(-a) + f(a);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(-a + i * h);
  return sum * h / 3.0;
}

double hermite_wavefunction(int n, double x) {
  const double norm = std::sqrt(std::pow(2.0, n) * std::tgamma(n + 1.0) *
                                std::sqrt(std::numbers::pi));
  return std::hermite(n, x) * std::exp(-0.5 * x * x) / norm;
}

TEST(FockWavefunction, MatchesHermiteForm) {
  for (int n = 0; n < 15; ++n) {
    for (double x : {-3.1, -0.4, 0.0, 0.9, 2.5}) {
      EXPECT_NEAR(fock_wavefunction(n, x), hermite_wavefunction(n, x), 1e-12)
          << "n=" << n << " x=" << x;
    }
  }
}

TEST(FockWavefunction, Orthonormal) {
  for (int m = 0; m < 12; m += 3) {
    for (int n = m; n < 12; n += 2) {
      const double overlap =
          integrate([&](double x) { return fock_wavefunction(m, x) * fock_wavefunction(n, x); });
      EXPECT_NEAR(overlap, m == n ? 1.0 : 0.0, 1e-10) << m << "," << n;
    }
  }
}

TEST(QuadratureDensity, GaussianStateMatchesNormalPdf) {
  const auto rho = lossy_squeezed_vacuum(FockDim(30), SqueezeParams(0.375, 0.4), 0.28);
  for (double theta : {0.0, 0.4, 1.2}) {
    const auto density = quadrature_density(rho, theta);
    const double var = gaussian_variance(*rho.gaussian(), theta) / kShotNoiseVarianceScale;
    for (double x : {-1.5, -0.3, 0.0, 0.8}) {
      const double pdf = std::exp(-x * x / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
      EXPECT_NEAR(density(x), pdf, 1e-12);
    }
  }
}

TEST(QuadratureDensity, NormalisedAndPiPeriodic) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  m(0, 0) = 0.5;
  m(1, 1) = 0.3;
  m(2, 2) = 0.2;
  m(0, 1) = std::complex<double>(0.1, 0.2);
  m(1, 0) = std::conj(m(0, 1));
  m(0, 2) = 0.15;
  m(2, 0) = 0.15;
  const DensityMatrix rho(FockDim(3), m);
  for (double theta : {0.0, 0.7, 2.0}) {
    const auto p = quadrature_density(rho, theta);
    const auto shifted = quadrature_density(rho, theta + std::numbers::pi);
    EXPECT_NEAR(integrate([&](double x) { return p(x); }), 1.0, 1e-10);
    for (double x : {-1.0, 0.2, 1.4}) EXPECT_NEAR(shifted(x), p(-x), 1e-14);
    // First moment agrees with the operator expectation value.
    const double mean = integrate([&](double x) { return x * p(x); });
    EXPECT_NEAR(internal_to_shot_noise(mean), quadrature_moments(rho, theta).mean, 1e-10);
  }
}

TEST(QuadratureDensity, MomentumMarginalSignConvention) {
  // (|0> + i|1>)/sqrt2 has <a> = i/2, so <p> > 0 and <x> = 0.
  Eigen::MatrixXcd m(2, 2);
  m << 0.5, std::complex<double>(0, -0.5), std::complex<double>(0, 0.5), 0.5;
  const DensityMatrix rho(FockDim(2), m);
  EXPECT_GT(quadrature_moments(rho, std::numbers::pi / 2).mean, 0.5);
  EXPECT_NEAR(quadrature_moments(rho, 0.0).mean, 0.0, 1e-15);
}

double chi_square_normal(const std::vector<double>& xs, double var, int bins, double half) {
  std::vector<double> counts(bins, 0.0);
  const double width = 2 * half / bins;
  for (double x : xs) {
    const int b = static_cast<int>(std::floor((x + half) / width));
    if (b >= 0 && b < bins) counts[b] += 1;
  }
  const double sd = std::sqrt(var);
  double chi2 = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double lo = -half + b * width, hi = lo + width;
    const double prob = 0.5 * (std::erf(hi / (sd * std::sqrt(2.0))) -
                               std::erf(lo / (sd * std::sqrt(2.0))));
    const double expected = prob * xs.size();
    chi2 += (counts[b] - expected) * (counts[b] - expected) / expected;
  }
  return chi2 / (bins - 1);
}

// 0.1% and 99.9% quantiles of chi-square with 39 degrees of freedom, per dof.
constexpr double kChiLow = 17.0 / 39.0;
constexpr double kChiHigh = 72.1 / 39.0;

TEST(Sampling, GaussianPathHasCorrectDistribution) {
  const auto rho = lossy_squeezed_vacuum(FockDim(6), SqueezeParams(0.375, 0.0), 0.28);
  const auto samples =
      sample_quadratures(rho, PhaseSchedule::fixed({0.0}), 200000, 42);
  std::vector<double> xs;
  for (const auto& s : samples) xs.push_back(s.x);
  const double var = 0.28 * std::exp(-0.75) + 0.72;
  const double chi = chi_square_normal(xs, var, 40, 3.0);
  EXPECT_GT(chi, kChiLow);
  EXPECT_LT(chi, kChiHigh);
}

TEST(Sampling, TabulatedPathMatchesGaussianPath) {
  const auto rho = lossy_squeezed_vacuum(FockDim(12), SqueezeParams(0.375, 0.0), 0.28);
  SamplingOptions tabulated;
  tabulated.force_tabulated = true;
  const auto samples =
      sample_quadratures(rho, PhaseSchedule::fixed({std::numbers::pi / 2}), 200000, 7, tabulated);
  std::vector<double> xs;
  for (const auto& s : samples) xs.push_back(s.x);
  const double var = 0.28 * std::exp(0.75) + 0.72;
  const double chi = chi_square_normal(xs, var, 40, 3.5);
  EXPECT_GT(chi, kChiLow);
  EXPECT_LT(chi, kChiHigh);
}

TEST(Sampling, NumberStateSecondMoment) {
  SamplingOptions opts;
  const auto samples =
      sample_quadratures(fock_state(FockDim(4), 1), PhaseSchedule::uniform(), 200000, 3, opts);
  double m2 = 0.0, m4 = 0.0;
  for (const auto& s : samples) {
    m2 += s.x * s.x;
    m4 += s.x * s.x * s.x * s.x;
  }
  m2 /= samples.size();
  m4 /= samples.size();
  const double stderr_m2 = std::sqrt((m4 - m2 * m2) / samples.size());
  EXPECT_NEAR(m2, 3.0, 5.0 * stderr_m2);
}

TEST(Sampling, TablePhaseIsReported) {
  SamplingOptions opts;
  opts.phase_table_size = 16;
  const auto samples =
      sample_quadratures(fock_state(FockDim(3), 1), PhaseSchedule::uniform(), 1000, 9, opts);
  for (const auto& s : samples) {
    const double k = s.theta / (2 * std::numbers::pi / 16);
    EXPECT_NEAR(k, std::round(k), 1e-12);
  }
}

TEST(Sampling, IndependentOfThreadCount) {
  for (bool tabulated : {false, true}) {
    const auto rho = lossy_squeezed_vacuum(FockDim(6), SqueezeParams(0.375, 0.0), 0.28);
    SamplingOptions one, four;
    one.force_tabulated = four.force_tabulated = tabulated;
    four.threads = 4;
    const auto a = sample_quadratures(rho, PhaseSchedule::uniform(), 150000, 99, one);
    const auto b = sample_quadratures(rho, PhaseSchedule::uniform(), 150000, 99, four);
    ASSERT_EQ(a.size(), b.size());
    EXPECT_TRUE(a == b) << "tabulated=" << tabulated;
  }
}

TEST(Sampling, SeedsGiveDifferentStreams) {
  const auto rho = vacuum_state(FockDim(3));
  const auto a = sample_quadratures(rho, PhaseSchedule::uniform(), 10, 1);
  const auto b = sample_quadratures(rho, PhaseSchedule::uniform(), 10, 2);
  EXPECT_FALSE(a == b);
}

TEST(Sampling, TriangleScheduleSweepsPhase) {
  const auto samples = sample_quadratures(vacuum_state(FockDim(3)),
                                          PhaseSchedule::triangle(0.1, 2.0, 100.0), 200, 5);
  EXPECT_DOUBLE_EQ(samples[0].theta, 0.1);
  EXPECT_DOUBLE_EQ(samples[50].theta, 2.1);
  EXPECT_DOUBLE_EQ(samples[100].theta, 0.1);
}

TEST(Sampling, RejectsBadInput) {
  const auto rho = vacuum_state(FockDim(3));
  EXPECT_TRUE(raises(ErrorKind::kInvalidArgument,
                     [&] { sample_quadratures(rho, PhaseSchedule::uniform(), 0, 1); }));
  EXPECT_TRUE(raises(ErrorKind::kInvalidArgument,
                     [&] { sample_quadratures(rho, PhaseSchedule::fixed({}), 5, 1); }));
}

TEST(SamplesCsv, RoundTripConvertsToInternalUnits) {
  const auto samples = sample_quadratures(vacuum_state(FockDim(3)), PhaseSchedule::uniform(), 50, 8);
  const auto text = samples_csv(samples);
  EXPECT_EQ(text.substr(0, text.find('\n')), "theta_rad,x_shotnoise");
  const auto back = parse_samples_csv(text);
  ASSERT_EQ(back.size(), samples.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].theta, samples[i].theta);
    EXPECT_EQ(back[i].units, QuadratureUnits::kVacuumHalf);
    EXPECT_NEAR(back[i].internal_x(), samples[i].internal_x(), 1e-15);
  }
}

TEST(SamplesCsv, ErrorsCarryLineNumbers) {
  try {
    parse_samples_csv("theta_rad,x_shotnoise\n0.1,0.2\n0.3,abc\n");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_TRUE(raises(ErrorKind::kParseError, [] { parse_samples_csv("x,y\n1,2\n"); }));
}

}  // namespace
}  // namespace homodyne
