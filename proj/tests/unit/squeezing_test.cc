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

#include "homodyne/squeezing.h"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "json.hpp"
#include "test_util.h"

namespace homodyne {
namespace {

using testing::raises;

const std::vector<double> kPowers = {5, 10, 20, 30, 40, 50, 60, 72.7};

std::vector<VariancePair> noiseless(double eta, double mu) {
  std::vector<VariancePair> out;
  for (double p : kPowers) out.push_back(eq1_forward(eta, mu, p));
  return out;
}

TEST(Eq1Forward, ReferenceOperatingPoint) {
  const auto v = eq1_forward(0.28, 0.044, 72.7);
  const double r = 0.044 * std::sqrt(72.7);
  EXPECT_NEAR(*v.v_min, 0.28 * std::exp(-2 * r) + 0.72, 1e-15);
  EXPECT_NEAR(*v.v_min, 0.852, 5e-4);
  EXPECT_NEAR(*v.v_max, 1.313, 1e-3);
  EXPECT_NEAR(10 * std::log10(*v.v_min), -0.695, 2e-3);
  EXPECT_NEAR(10 * std::log10(*v.v_max), 1.18, 0.01);
}

TEST(Eq1Forward, Limits) {
  const auto lossless = eq1_forward(1.0, 0.1, 25.0);
  EXPECT_NEAR(*lossless.v_max, std::exp(1.0), 1e-15);
  EXPECT_NEAR(*lossless.v_min, std::exp(-1.0), 1e-15);
  const auto off = eq1_forward(0.5, 0.1, 0.0);
  EXPECT_EQ(*off.v_max, 1.0);
  EXPECT_EQ(*off.v_min, 1.0);
  EXPECT_TRUE(raises(ErrorKind::kInvalidArgument, [] { eq1_forward(1.1, 0.1, 1.0); }));
  EXPECT_TRUE(raises(ErrorKind::kInvalidArgument, [] { eq1_forward(0.5, -0.1, 1.0); }));
}

TEST(Eq1Forward, UncertaintyBound) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double eta = u(gen), mu = 0.2 * u(gen), p = 100 * u(gen);
    const auto v = eq1_forward(eta, mu, p);
    EXPECT_GE(*v.v_max * *v.v_min, 1.0 - 1e-14);
  }
  const auto pure = eq1_forward(1.0, 0.1, 40.0);
  EXPECT_NEAR(*pure.v_max * *pure.v_min, 1.0, 1e-14);
}

TEST(LossCorrect, InvertsForwardModel) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double eta = 1e-3 + (1 - 1e-3) * u(gen), mu = 0.1 * u(gen), p = 100 * u(gen);
    const auto v = eq1_forward(eta, mu, p);
    EXPECT_NEAR(loss_correct(*v.v_min, eta).variance, std::exp(-2 * mu * std::sqrt(p)), 1e-12);
  }
}

TEST(LossCorrect, SourceSqueezingAtReferencePoint) {
  const auto src = loss_correct(0.852, 0.28);
  EXPECT_NEAR(src.variance, (0.852 - 0.72) / 0.28, 1e-15);
  EXPECT_NEAR(src.squeezing_db, 3.26, 0.01);
  EXPECT_DOUBLE_EQ(loss_correct(0.4, 1.0).variance, 0.4);
}

TEST(LossCorrect, Errors) {
  EXPECT_TRUE(raises(ErrorKind::kUnphysical, [] { loss_correct(0.70, 0.28); }));
  EXPECT_TRUE(raises(ErrorKind::kUnphysical, [] { loss_correct(0.72, 0.28); }));
  EXPECT_TRUE(raises(ErrorKind::kInvalidEta, [] { loss_correct(0.9, 0.0); }));
  EXPECT_TRUE(raises(ErrorKind::kInvalidEta, [] { loss_correct(0.9, 1.2); }));
}

TEST(FitEq1, NoiselessRecovery) {
  const auto fit = fit_eq1(noiseless(0.28, 0.044));
  EXPECT_NEAR(fit.estimate.eta, 0.28, 1e-8);
  EXPECT_NEAR(fit.estimate.mu, 0.044, 1e-8);
  EXPECT_EQ(fit.estimate.n_points, 16u);
  EXPECT_LT(fit.estimate.residual_norm, 1e-8);
  EXPECT_EQ(fit.weighting, "relative_1_over_v2");
}

TEST(FitEq1, AlternativeModes) {
  const auto data = noiseless(0.45, 0.06);
  Eq1FitOptions db;
  db.space = FitSpace::kDecibel;
  Eq1FitOptions separate;
  separate.branches = FitBranches::kSeparate;
  Eq1FitOptions uniform;
  uniform.relative_weights = false;
  for (const auto& opts : {db, separate, uniform}) {
    const auto fit = fit_eq1(data, opts);
    EXPECT_NEAR(fit.estimate.eta, 0.45, 1e-7);
    EXPECT_NEAR(fit.estimate.mu, 0.06, 1e-7);
  }
  EXPECT_EQ(fit_eq1(data, separate).branch_estimates.size(), 2u);
}

TEST(FitEq1, DecibelRoundTripLeavesEstimateUnchanged) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> noise(0.0, 0.01);
  auto data = noiseless(0.28, 0.044);
  for (auto& pair : data) {
    *pair.v_max *= 1 + noise(gen);
    *pair.v_min *= 1 + noise(gen);
  }
  auto converted = data;
  for (auto& pair : converted) {
    for (auto* v : {&pair.v_max, &pair.v_min}) {
      const double db = 10 * std::log10(**v);
      **v = std::pow(10.0, db / 10.0);
    }
  }
  const auto a = fit_eq1(data), b = fit_eq1(converted);
  EXPECT_NEAR(a.estimate.eta, b.estimate.eta, 1e-10);
  EXPECT_NEAR(a.estimate.mu, b.estimate.mu, 1e-10);
}

TEST(FitEq1, NoisyStandardErrorsHaveExpectedScale) {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> noise(0.0, 0.01);
  auto data = noiseless(0.28, 0.044);
  for (auto& pair : data) {
    *pair.v_max *= 1 + noise(gen);
    *pair.v_min *= 1 + noise(gen);
  }
  const auto fit = fit_eq1(data);
  EXPECT_GT(fit.estimate.eta_stderr, 0.002);
  EXPECT_LT(fit.estimate.eta_stderr, 0.05);
  EXPECT_GT(fit.estimate.mu_stderr, 0.0005);
  EXPECT_LT(fit.estimate.mu_stderr, 0.01);
}

TEST(FitEq1, Underdetermined) {
  std::vector<VariancePair> same(5, eq1_forward(0.3, 0.05, 20.0));
  EXPECT_TRUE(raises(ErrorKind::kUnderdetermined, [&] { fit_eq1(same); }));
  std::vector<VariancePair> zero(5, eq1_forward(0.3, 0.05, 0.0));
  EXPECT_TRUE(raises(ErrorKind::kUnderdetermined, [&] { fit_eq1(zero); }));

  // Squeezed branch alone at weak pumping only constrains eta * mu.
  std::vector<VariancePair> weak;
  for (double p : {1e-8, 2e-8, 3e-8, 4e-8}) {
    auto v = eq1_forward(0.3, 0.05, p);
    v.v_max.reset();
    weak.push_back(v);
  }
  EXPECT_TRUE(raises(ErrorKind::kUnderdetermined, [&] { fit_eq1(weak); }));
}

TEST(FitEq1, RejectsBadVariances) {
  auto data = noiseless(0.28, 0.044);
  data[2].v_min = -1.0;
  EXPECT_TRUE(raises(ErrorKind::kInvalidArgument, [&] { fit_eq1(data); }));
}

TEST(FitEq1, JsonReport) {
  const auto fit = fit_eq1(noiseless(0.28, 0.044));
  const auto j = nlohmann::json::parse(eq1_fit_json(fit));
  for (const char* key : {"eta_hat", "eta_stderr", "mu_hat_per_sqrt_mw", "mu_stderr_per_sqrt_mw",
                          "n_points", "residual_norm", "weighting"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_NEAR(j["eta_hat"].get<double>(), 0.28, 1e-8);
}

NoiseTrace flat_trace(const std::vector<double>& f, double dbm) {
  NoiseTrace t;
  t.freq_hz = f;
  t.power_dbm.assign(f.size(), dbm);
  return t;
}

TEST(SqueezingSpectrum, IdenticalTracesGiveZero) {
  const std::vector<double> f = {1e8, 2e8, 3e8};
  const auto shot = flat_trace(f, -65.0), dark = flat_trace(f, -75.0);
  const auto s = squeezing_vs_frequency(shot, shot, dark);
  for (double v : s.squeezing_db) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(s.masked_count(), 0u);
}

TEST(SqueezingSpectrum, AntisymmetricUnderSwap) {
  const std::vector<double> f = {1e8, 2e8};
  const auto sq = flat_trace(f, -66.0), shot = flat_trace(f, -65.0), dark = flat_trace(f, -75.0);
  const auto a = squeezing_vs_frequency(sq, shot, dark);
  const auto b = squeezing_vs_frequency(shot, sq, dark);
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_NEAR(a.squeezing_db[i], -b.squeezing_db[i], 1e-12);
    const double expected = 10 * std::log10((dbm_to_mw(-66) - dbm_to_mw(-75)) /
                                            (dbm_to_mw(-65) - dbm_to_mw(-75)));
    EXPECT_NEAR(a.squeezing_db[i], expected, 1e-12);
  }
}

TEST(SqueezingSpectrum, MasksAndExclusions) {
  const std::vector<double> f = {1e9, 4.29e9, 8e9, 9.5e9};
  auto sq = flat_trace(f, -66.0), shot = flat_trace(f, -65.0);
  const auto dark = flat_trace(f, -75.0);
  shot.power_dbm[3] = -75.0;
  sq.power_dbm[2] = -76.0;
  const std::vector<FrequencyBand> excluded = {{4.28e9, 4.30e9}};
  const auto s = squeezing_vs_frequency(sq, shot, dark, excluded);
  EXPECT_FALSE(s.masked[0]);
  EXPECT_TRUE(s.masked[1]);
  EXPECT_EQ(s.mask_reason[1], "excluded_band");
  EXPECT_EQ(s.mask_reason[2], "squeezed_at_or_below_dark");
  EXPECT_EQ(s.mask_reason[3], "shot_at_or_below_dark");
  for (int i = 1; i < 4; ++i) EXPECT_TRUE(std::isnan(s.squeezing_db[i]));
  EXPECT_NEAR(s.mean_db(0.0, 1e10), s.squeezing_db[0], 1e-15);
  const auto csv = squeezing_spectrum_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "freq_hz,squeezing_db,masked");
  EXPECT_NE(csv.find("4290000000,,1\n"), std::string::npos) << csv;
}

TEST(SqueezingSpectrum, GridMismatch) {
  const auto a = flat_trace({1.0, 2.0}, -60), b = flat_trace({1.0, 3.0}, -60);
  EXPECT_TRUE(raises(ErrorKind::kGridMismatch, [&] { squeezing_vs_frequency(a, b, a); }));
}

TEST(ScanExtrema, Percentiles) {
  std::vector<double> v;
  for (int i = 100; i >= 0; --i) v.push_back(i);
  const auto e = scan_extrema(v);
  EXPECT_DOUBLE_EQ(e.v_min, 2.0);
  EXPECT_DOUBLE_EQ(e.v_max, 98.0);
  const auto raw = scan_extrema(v, 0.0, 100.0);
  EXPECT_DOUBLE_EQ(raw.v_min, 0.0);
  EXPECT_DOUBLE_EQ(raw.v_max, 100.0);
  EXPECT_TRUE(raises(ErrorKind::kInsufficientPoints, [] { scan_extrema({}); }));
}

TEST(SqueezerSpec, Validation) {
  SqueezerSpec spec;
  spec.p_shg_mw = 72.7;
  EXPECT_NEAR(spec.squeezing_parameter(), 0.044 * std::sqrt(72.7), 1e-15);
  spec.mu = -1;
  EXPECT_TRUE(raises(ErrorKind::kInvalidArgument, [&] { spec.validate(); }));
}

}  // namespace
}  // namespace homodyne
