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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "homodyne/quadrature.h"
#include "test_util.h"

namespace homodyne {
namespace {

using testing::raises;

template <typename F>
double simpson(F f, double a, double b, int n = 4000) {
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

DensityMatrix mixed_test_state() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(0, 0) = 0.4;
  m(1, 1) = 0.3;
  m(2, 2) = 0.2;
  m(3, 3) = 0.1;
  m(0, 1) = std::complex<double>(0.1, -0.15);
  m(1, 2) = std::complex<double>(-0.05, 0.1);
  m(0, 3) = std::complex<double>(0.05, 0.02);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) m(j, i) = std::conj(m(i, j));
  }
  return DensityMatrix(FockDim(4), m);
}

TEST(Povm, HalfLineOverlapClosedForm) {
  // int_0^inf psi_0 psi_1 dx = 1 / sqrt(2 pi).
  const auto povm = build_povm(FockDim(3), {0.0}, {0.0});
  EXPECT_NEAR(povm.bin_overlap(1)(0, 1), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-13);
  EXPECT_NEAR(povm.bin_overlap(0)(0, 1), -1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-13);
  EXPECT_NEAR(povm.bin_overlap(1)(0, 0), 0.5, 1e-14);
}

TEST(Povm, CompleteForDefaultGrid) {
  const auto povm = build_povm(FockDim(6), default_bin_edges(0.8), uniform_phases(12));
  EXPECT_LT(povm.completeness_residual(), 1e-10);
  EXPECT_EQ(povm.edges().size(), 102u);
  EXPECT_EQ(povm.n_bins(), 103u);
  EXPECT_EQ(povm.n_outcomes(), 12u * 103u);
}

TEST(Povm, ProbabilitiesMatchIntegratedDensity) {
  const auto rho = mixed_test_state();
  const std::vector<double> edges = {-1.0, -0.2, 0.5, 1.3};
  const auto povm = build_povm(FockDim(4), edges, {0.0, 0.9, 2.1});
  for (std::size_t k = 0; k < povm.n_phases(); ++k) {
    const auto density = quadrature_density(rho, povm.phases()[k]);
    double total = 0.0;
    for (std::size_t b = 0; b < povm.n_bins(); ++b) {
      const double lo = b == 0 ? -12.0 : edges[b - 1];
      const double hi = b == edges.size() ? 12.0 : edges[b];
      const double expected = simpson([&](double x) { return density(x); }, lo, hi);
      const double p = povm.probability(rho.elements(), k, b);
      EXPECT_NEAR(p, expected, 1e-10) << "phase " << k << " bin " << b;
      const Eigen::MatrixXcd el = povm.element(k, b);
      EXPECT_NEAR((rho.elements() * el).trace().real(), p, 1e-14);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Povm, ElementsArePositiveAndHermitian) {
  const auto povm = build_povm(FockDim(5), {-0.5, 0.5}, {0.3});
  for (std::size_t b = 0; b < povm.n_bins(); ++b) {
    const Eigen::MatrixXcd el = povm.element(0, b);
    EXPECT_LT((el - el.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(el);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(Povm, RejectsInvalidEdges) {
  EXPECT_TRUE(raises(ErrorKind::kInvalidArgument, [] { build_povm(FockDim(3), {1.0, 0.0}, {0.0}); }));
  EXPECT_TRUE(raises(ErrorKind::kInvalidArgument, [] { build_povm(FockDim(3), {25.0}, {0.0}); }));
  EXPECT_TRUE(raises(ErrorKind::kInvalidArgument, [] { build_povm(FockDim(3), {0.0}, {}); }));
}

TEST(Povm, HighLevelsLeakPastIntegrationRange) {
  // psi_n reaches |x| ~ sqrt(2n + 1), beyond the +-20 integration range.
  EXPECT_TRUE(raises(ErrorKind::kIncompletePovm, [] { build_povm(FockDim(260), {0.0}, {0.0}); }));
}

TEST(Povm, DefaultGridShape) {
  const auto edges = default_bin_edges(1.0);
  ASSERT_EQ(edges.size(), 102u);
  EXPECT_DOUBLE_EQ(edges.front(), -5.0);
  EXPECT_DOUBLE_EQ(edges.back(), 5.0);
  const auto phases = uniform_phases(4);
  ASSERT_EQ(phases.size(), 4u);
  EXPECT_DOUBLE_EQ(phases[1], std::numbers::pi / 4);
}

}  // namespace
}  // namespace homodyne
