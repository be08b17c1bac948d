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

#ifndef HOMODYNE_NOISE_TRACE_H_
#define HOMODYNE_NOISE_TRACE_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace homodyne {

// Frequency-indexed power spectrum as read from a spectrum analyser.
struct NoiseTrace {
  std::vector<double> freq_hz;
  std::vector<double> power_dbm;
  double rbw_hz = 0.0;
  std::string label;

  // Throws kInvalidArgument unless frequencies strictly increase and the
  // arrays have equal length.
  void validate() const;
  std::size_t size() const { return freq_hz.size(); }
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

// Adds a per-frequency correction (dB) to compensate RF cable loss.
NoiseTrace apply_cable_correction(const NoiseTrace& trace,
                                  std::span<const double> correction_db);

bool same_grid(const NoiseTrace& a, const NoiseTrace& b);

// CSV with '#' header comments, e.g.
//   # rbw_hz=8e6
//   # label=shot
//   freq_hz,power_dbm[,cable_loss_db]
// An optional third column is added to power_dbm on read.
NoiseTrace parse_noise_trace_csv(std::string_view text);
std::string noise_trace_csv(const NoiseTrace& trace);

}  // namespace homodyne

#endif  // HOMODYNE_NOISE_TRACE_H_
