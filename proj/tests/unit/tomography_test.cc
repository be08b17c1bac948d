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

#include "homodyne/tomography.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "test_util.h"

namespace homodyne {
namespace {

using testing::raises;
constexpr double kPi = std::numbers::pi;

// Vacuum bin probability in internal units (variance 1/2).
double vacuum_bin_probability(double lo, double hi) {
  return 0.5 * (std::erf(hi) - std::erf(lo));
}

TEST(BinSamples, OnGridSamplesAreLossless) {
  const auto povm = build_povm(FockDim(3), {-1.0, 0.0, 1.0}, uniform_phases(4));
  std::vector<QuadratureSample> samples;
  for (std::size_t k = 0; k < 4; ++k) {
    samples.push_back({povm.phases()[k], -1.5, QuadratureUnits::kVacuumHalf});
    samples.push_back({povm.phases()[k], 0.5, QuadratureUnits::kVacuumHalf});
  }
  const auto data = bin_samples(samples, povm);
  EXPECT_EQ(data.total(), samples.size());
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(data.count(k, 0), 1u);
    EXPECT_EQ(data.count(k, 2), 1u);
  }
}

TEST(BinSamples, FoldsHalfTurnWithSignFlip) {
  const auto povm = build_povm(FockDim(3), {0.0}, uniform_phases(2));
  const std::vector<QuadratureSample> samples = {
      {kPi + 0.01, 0.7, QuadratureUnits::kVacuumHalf},
      {-0.01, 0.7, QuadratureUnits::kVacuumHalf}};
  const auto data = bin_samples(samples, povm);
  EXPECT_EQ(data.count(0, 0), 1u);  // x -> -x on the fold
  EXPECT_EQ(data.count(0, 1), 1u);
}

TEST(BinSamples, CoarseGridIsRejected) {
  const auto povm = build_povm(FockDim(3), {0.0}, {0.0});
  const std::vector<QuadratureSample> samples = {{kPi / 2 - 0.01, 0.1}};
  EXPECT_NO_THROW(bin_samples(samples, povm));
  const auto clustered = build_povm(FockDim(3), {0.0}, {0.0, 0.1});
  EXPECT_TRUE(raises(ErrorKind::kPhaseGridTooCoarse, [&] { bin_samples(samples, clustered); }));
}

TEST(BinSamples, EmptyInputGivesZeroCounts) {
  const auto povm = build_povm(FockDim(3), {0.0}, uniform_phases(3));
  const auto data = bin_samples({}, povm);
  EXPECT_EQ(data.total(), 0u);
  EXPECT_EQ(data.counts().size(), 6u);
}

TEST(BinSamples, VacuumHistogramsMatchGaussian) {
  const auto povm = build_povm(FockDim(4), default_bin_edges(std::sqrt(0.5)), uniform_phases(20));
  const auto samples =
      sample_quadratures(vacuum_state(FockDim(4)), PhaseSchedule::uniform(), 1000000, 77);
  const auto data = bin_samples(samples, povm);
  EXPECT_EQ(data.total(), 1000000u);
  const auto& e = povm.edges();
  double chi2 = 0.0;
  int dof = 0;
  for (std::size_t k = 0; k < data.n_phases(); ++k) {
    std::uint64_t n_phase = 0;
    for (std::size_t b = 0; b < data.n_bins(); ++b) n_phase += data.count(k, b);
    for (std::size_t b = 0; b < data.n_bins(); ++b) {
      const double lo = b == 0 ? -INFINITY : e[b - 1];
      const double hi = b == e.size() ? INFINITY : e[b];
      const double expected = n_phase * vacuum_bin_probability(lo, hi);
      if (expected < 5.0) continue;
      const double d = data.count(k, b) - expected;
      chi2 += d * d / expected;
      ++dof;
    }
    --dof;
  }
  EXPECT_GT(chi2 / dof, 0.8);
  EXPECT_LT(chi2 / dof, 1.2);
}

TEST(BinSamples, PermutationInvariant) {
  const auto povm = build_povm(FockDim(4), default_bin_edges(0.8), uniform_phases(10));
  auto samples = sample_quadratures(vacuum_state(FockDim(4)), PhaseSchedule::uniform(), 5000, 3);
  const auto a = bin_samples(samples, povm);
  std::mt19937_64 gen(1);
  std::shuffle(samples.begin(), samples.end(), gen);
  const auto b = bin_samples(samples, povm);
  EXPECT_EQ(a.counts(), b.counts());
}

TEST(Mle, SingleBinKeepsMaximallyMixedState) {
  const auto povm = build_povm(FockDim(4), {}, {0.0});
  const BinnedData data({0.0}, {}, {100});
  const auto report = mle_reconstruct(data, povm);
  EXPECT_TRUE(report.converged);
  EXPECT_LT((report.rho.elements() - maximally_mixed(FockDim(4)).elements()).cwiseAbs().maxCoeff(),
            1e-15);
}

struct Reconstruction {
  MleReport report;
  BinnedData data;
  HomodynePovm povm;
};

Reconstruction reconstruct(const DensityMatrix& truth, int cutoff, std::size_t n,
                           std::uint64_t seed, int threads = 1) {
  const auto samples = sample_quadratures(truth, PhaseSchedule::uniform(), n, seed);
  double widest = 0.0;
  for (int i = 0; i < 16; ++i) {
    widest = std::max(widest, quadrature_moments(truth, kPi * i / 16).variance);
  }
  auto povm = build_povm(FockDim(cutoff), default_bin_edges(std::sqrt(widest / 2)),
                         uniform_phases(30));
  auto data = bin_samples(samples, povm);
  MleOptions opts;
  opts.threads = threads;
  opts.seed = seed;
  auto report = mle_reconstruct(data, povm, opts);
  return {std::move(report), std::move(data), std::move(povm)};
}

TEST(Mle, VacuumReconstruction) {
  const auto rec = reconstruct(vacuum_state(FockDim(6)), 6, 100000, 12);
  EXPECT_GE(rec.report.rho(0, 0).real(), 0.99);
  EXPECT_GE(fidelity(rec.report.rho, vacuum_state(FockDim(6))), 0.995);
  EXPECT_EQ(rec.report.seed, 12u);
}

TEST(Mle, LikelihoodNeverDecreases) {
  const auto truth = lossy_squeezed_vacuum(FockDim(6), SqueezeParams(0.375, 0.0), 0.28);
  const auto rec = reconstruct(truth, 6, 100000, 5);
  const auto& ll = rec.report.log_likelihood;
  ASSERT_FALSE(ll.empty());
  for (std::size_t i = 1; i < ll.size(); ++i) EXPECT_GE(ll[i], ll[i - 1] - 1e-10) << i;
  EXPECT_NEAR(rec.report.rho.trace(), 1.0, 1e-12);
  EXPECT_GE(rec.report.rho.min_eigenvalue(), -1e-10);
  EXPECT_NEAR(ll.back(), log_likelihood(rec.data, rec.povm, rec.report.rho.elements()), 1e-6);
}

TEST(Mle, PredictedFrequenciesMatchData) {
  const auto truth = lossy_squeezed_vacuum(FockDim(6), SqueezeParams(0.375, 0.7), 0.28);
  const auto rec = reconstruct(truth, 6, 200000, 6);
  EXPECT_GE(fidelity(rec.report.rho, truth), 0.99);
  double chi2 = 0.0;
  int dof = 0;
  for (std::size_t k = 0; k < rec.data.n_phases(); ++k) {
    double n_phase = 0.0;
    for (std::size_t b = 0; b < rec.data.n_bins(); ++b) n_phase += rec.data.count(k, b);
    for (std::size_t b = 0; b < rec.data.n_bins(); ++b) {
      const double expected = n_phase * rec.povm.probability(rec.report.rho.elements(), k, b);
      if (expected < 5.0) continue;
      const double d = rec.data.count(k, b) - expected;
      chi2 += d * d / expected;
      ++dof;
    }
  }
  EXPECT_LT(chi2 / dof, 1.5);
}

TEST(Mle, IndependentOfThreadCount) {
  const auto truth = lossy_squeezed_vacuum(FockDim(6), SqueezeParams(0.375, 0.0), 0.28);
  const auto a = reconstruct(truth, 6, 20000, 9, 1);
  const auto b = reconstruct(truth, 6, 20000, 9, 3);
  EXPECT_EQ(a.report.iterations, b.report.iterations);
  EXPECT_EQ((a.report.rho.elements() - b.report.rho.elements()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Mle, LargerSpaceLeavesHighLevelsEmpty) {
  const auto truth = lossy_squeezed_vacuum(FockDim(6), SqueezeParams(0.375, 0.0), 0.28);
  const auto rec = reconstruct(truth, 8, 100000, 10);
  for (int n = 6; n < 8; ++n) EXPECT_LT(rec.report.rho(n, n).real(), 1e-2) << n;
}

TEST(Mle, InputErrors) {
  const auto povm = build_povm(FockDim(3), {0.0}, {0.0});
  const BinnedData empty({0.0}, {0.0}, {0, 0});
  EXPECT_TRUE(raises(ErrorKind::kInvalidArgument, [&] { mle_reconstruct(empty, povm); }));
  const BinnedData other({0.5}, {0.0}, {1, 1});
  EXPECT_TRUE(raises(ErrorKind::kGridMismatch, [&] { mle_reconstruct(other, povm); }));
  EXPECT_TRUE(raises(ErrorKind::kInvalidArgument,
                     [] { BinnedData({0.0}, {0.0}, {1, 2, 3}); }));
}

TEST(Mle, ProgressCallbackAndJson) {
  const auto povm = build_povm(FockDim(3), {-0.5, 0.5}, uniform_phases(3));
  const auto samples =
      sample_quadratures(vacuum_state(FockDim(3)), PhaseSchedule::uniform(), 3000, 2);
  MleOptions opts;
  int calls = 0;
  opts.progress = [&](int, double, double) { ++calls; };
  const auto report = mle_reconstruct(bin_samples(samples, povm), povm, opts);
  EXPECT_EQ(calls, report.iterations);
  const auto json = mle_report_json(report);
  EXPECT_NE(json.find("\"converged\""), std::string::npos);
  EXPECT_NE(json.find("\"log_likelihood\""), std::string::npos);
}

TEST(Fidelity, ReferenceValues) {
  const FockDim d(6);
  const auto vac = vacuum_state(d);
  EXPECT_NEAR(fidelity(vac, vac), 1.0, 1e-10);
  EXPECT_NEAR(fidelity(vac, fock_state(d, 1)), 0.0, 1e-10);
  EXPECT_NEAR(fidelity(vac, maximally_mixed(d)), 1.0 / 6.0, 1e-10);
  const auto rho = lossy_squeezed_vacuum(d, SqueezeParams(0.5, 0.2), 0.6);
  EXPECT_NEAR(fidelity(rho, rho), 1.0, 1e-10);
  // Pure reference: F = <psi|rho|psi>. The matrix square root of a rank-one
  // state resolves its null space only to about sqrt(machine epsilon).
  const auto pure = squeezed_vacuum(d, SqueezeParams(0.3, 0.2));
  const Eigen::VectorXcd psi = pure.elements().col(0) / std::sqrt(pure(0, 0).real());
  const double expected = (psi.adjoint() * rho.elements() * psi)(0, 0).real();
  EXPECT_NEAR(fidelity(rho, pure), expected, 1e-7);
  EXPECT_NEAR(fidelity(pure, rho), expected, 1e-7);
  EXPECT_TRUE(raises(ErrorKind::kInvalidArgument,
                     [] { fidelity(vacuum_state(FockDim(3)), vacuum_state(FockDim(4))); }));
}

TEST(PhaseScan, CalibrationRecoveredFromVariances) {
  const auto truth = lossy_squeezed_vacuum(FockDim(6), SqueezeParams(0.375, 0.0), 0.28);
  const PhaseCalibration cal{0.3, 2.5};
  ScanSettings scan;
  scan.v_low = 0.0;
  scan.v_high = 3.0;
  const auto records = simulate_phase_scan(truth, scan, cal, 400000, 17);
  const auto fitted = fit_phase_calibration(records);
  EXPECT_NEAR(fitted.rad_per_volt, 2.5, 0.05);
  for (double v : {0.2, 1.0, 2.5}) {
    double diff = std::remainder(fitted.phase(v) - cal.phase(v), kPi);
    EXPECT_NEAR(diff, 0.0, 0.05) << v;
  }
}

TEST(PhaseScan, RecordsFollowTriangleDrive) {
  ScanSettings scan;
  scan.sample_rate_hz = 1000.0;
  scan.drive_hz = 100.0;
  const auto records = simulate_phase_scan(vacuum_state(FockDim(3)), scan, {}, 20, 1);
  EXPECT_DOUBLE_EQ(records[0].drive_v, 0.0);
  EXPECT_DOUBLE_EQ(records[5].drive_v, 1.0);
  EXPECT_DOUBLE_EQ(records[10].drive_v, 0.0);
  EXPECT_DOUBLE_EQ(records[3].time_s, 0.003);
}

TEST(PhaseScan, ConstantPhaseWarnsButReconstructs) {
  const auto truth = lossy_squeezed_vacuum(FockDim(6), SqueezeParams(0.375, 0.0), 0.28);
  ScanSettings scan;
  scan.v_low = scan.v_high = 0.5;
  const auto records = simulate_phase_scan(truth, scan, {}, 20000, 4);
  ScanReconstructionOptions opts;
  opts.mle.max_iterations = 200;
  opts.wigner_points = 41;
  const auto rec = reconstruct_from_scan(records, {}, opts);
  ASSERT_FALSE(rec.warnings.empty());
  EXPECT_NE(rec.warnings.front().find("underdetermined"), std::string::npos);
  EXPECT_NEAR(rec.report.rho.trace(), 1.0, 1e-12);
  EXPECT_TRUE(raises(ErrorKind::kInsufficientPoints, [&] { fit_phase_calibration(records); }));
}

TEST(PhaseScan, VacuumContourIsCircular) {
  ScanSettings scan;
  scan.v_high = 4.0;
  const auto records = simulate_phase_scan(vacuum_state(FockDim(4)), scan, {0.0, 1.0}, 200000, 8);
  ScanReconstructionOptions opts;
  opts.cutoff = 4;
  opts.wigner_points = 81;
  const auto rec = reconstruct_from_scan(records, {0.0, 1.0}, opts);
  EXPECT_LT(rec.squeezed_axes.ratio(), 1.03);
  EXPECT_NEAR(rec.vacuum_contour_level, 1.0 / (kPi * std::numbers::e), 1e-15);
  EXPECT_NEAR(rec.wigner.integral(), 1.0, 1e-3);
}

TEST(PhaseScan, CsvRoundTripAndErrors) {
  const auto records = simulate_phase_scan(vacuum_state(FockDim(3)), {}, {}, 30, 2);
  const auto back = parse_scan_records_csv(scan_records_csv(records));
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].time_s, records[i].time_s);
    EXPECT_EQ(back[i].drive_v, records[i].drive_v);
    EXPECT_EQ(back[i].x, records[i].x);
  }
  try {
    parse_scan_records_csv("time_s,drive_v,x_shotnoise\n0,0,0\n1,2\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

}  // namespace
}  // namespace homodyne
