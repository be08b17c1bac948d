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

#ifndef HOMODYNE_TOOLS_SYNTHESIS_H_
#define HOMODYNE_TOOLS_SYNTHESIS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "config.h"
#include "homodyne/fock_state.h"
#include "homodyne/noise_trace.h"
#include "homodyne/squeezing.h"

namespace homodyne::cli {

// Multiplies each linear power by (1 + fraction * N(0, 1)).
NoiseTrace with_relative_noise(const NoiseTrace& trace, double fraction, std::uint64_t seed);

struct DetectorTraces {
  NoiseTrace shot;
  NoiseTrace dark;
};

// Dark (LO off) and vacuum shot-noise traces at the simulated LO power.
DetectorTraces synthesize_detector_traces(const ExperimentConfig& config, std::uint64_t seed);

struct SqueezingTraces {
  NoiseTrace squeezed;
  NoiseTrace shot;
  NoiseTrace dark;
};

// Squeezed-quadrature, shot and dark traces for the configured pump power.
// The source variance exp(-2 mu sqrt(P)) passes the optical stages ahead of
// the detector before the detector model applies its own efficiency.
SqueezingTraces synthesize_squeezing_traces(const ExperimentConfig& config, std::uint64_t seed);

struct LinearitySweep {
  std::vector<double> lo_power_mw;
  std::vector<double> variance_v2;
  double dark_variance_v2 = 0.0;
};

// Shot-noise voltage variance 2 e R P Z^2 B over a log-spaced LO sweep with
// relative noise. The top `saturated_points` powers are compressed by
// 1 / (1 + P / P_sat).
LinearitySweep synthesize_linearity(const ExperimentConfig& config, std::uint64_t seed);

std::string linearity_csv(const LinearitySweep& sweep);
// "# dark_variance_v2=..." then "lo_power_mw,variance_v2"; line-numbered
// kParseError on malformed rows.
LinearitySweep parse_linearity_csv(std::string_view text);

// eq1_forward at each pump power with relative noise on both branches.
std::vector<VariancePair> synthesize_variances(const ExperimentConfig& config,
                                               std::uint64_t seed);

std::string variances_csv(const std::vector<VariancePair>& pairs);
// "p_shg_mw,v_max_shotnoise,v_min_shotnoise"; either variance may be empty.
std::vector<VariancePair> parse_variances_csv(std::string_view text);

// Lossy squeezed vacuum described by the squeezer section, truncated to
// `cutoff`.
DensityMatrix true_state(const ExperimentConfig& config, int cutoff);

}  // namespace homodyne::cli

#endif  // HOMODYNE_TOOLS_SYNTHESIS_H_
