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

#include "synthesis.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "homodyne/detector.h"
#include "homodyne/error.h"
#include "homodyne/random.h"

namespace homodyne::cli {
namespace {

constexpr double kElementaryCharge = 1.602176634e-19;

// Chunk ids within Stream::kTraceNoise.
enum TraceChunk : std::uint64_t { kDark = 0, kShot = 1, kSqueezed = 2 };

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    pos = end + 1;
  }
  return out;
}

// Parses a comma-separated row; empty fields become NaN when allowed.
bool parse_row(std::string_view line, std::vector<double>& out, std::size_t n,
               bool allow_empty) {
  out.clear();
  std::size_t start = 0;
  for (std::size_t f = 0; f < n; ++f) {
    const std::size_t comma = line.find(',', start);
    const bool last = f + 1 == n;
    if (last != (comma == std::string_view::npos)) return false;
    const std::string field(line.substr(start, last ? std::string_view::npos : comma - start));
    if (field.empty()) {
      if (!allow_empty || f == 0) return false;
      out.push_back(std::nan(""));
    } else {
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0' || !std::isfinite(v)) return false;
      out.push_back(v);
    }
    start = comma + 1;
  }
  return true;
}

[[noreturn]] void row_error(std::size_t line_no, std::string_view what) {
  throw Error(ErrorKind::kParseError,
              "line " + std::to_string(line_no) + ": " + std::string(what));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> frequency_grid(const ExperimentConfig& config) {
  const auto& s = config.simulation;
  return linear_grid(s.freq_start_hz, s.freq_stop_hz, s.freq_points);
}

}  // namespace

NoiseTrace with_relative_noise(const NoiseTrace& trace, double fraction, std::uint64_t seed) {
  NoiseTrace out = trace;
  Rng rng(seed);
  for (auto& p : out.power_dbm) {
    const double scaled = dbm_to_mw(p) * (1.0 + fraction * rng.normal());
    p = mw_to_dbm(std::max(scaled, 1e-300));
  }
  return out;
}

DetectorTraces synthesize_detector_traces(const ExperimentConfig& config, std::uint64_t seed) {
  const auto spec = config.detector_spec();
  const auto freq = frequency_grid(config);
  const auto vacuum = [](double) { return 1.0; };
  const double noise = config.simulation.trace_noise;
  DetectorTraces out;
  out.dark = with_relative_noise(simulate_output_spectrum(spec, 0.0, freq, vacuum), noise,
                                 derive_stream(seed, Stream::kTraceNoise, kDark));
  out.shot = with_relative_noise(
      simulate_output_spectrum(spec, config.simulation.lo_power_mw, freq, vacuum), noise,
      derive_stream(seed, Stream::kTraceNoise, kShot));
  out.dark.label = "dark";
  out.shot.label = "shot";
  return out;
}

SqueezingTraces synthesize_squeezing_traces(const ExperimentConfig& config, std::uint64_t seed) {
  const auto base = synthesize_detector_traces(config, seed);
  const auto squeezer = config.squeezer_spec();
  const double eta = budget_product(squeezer.source_losses).total;
  const double v_src = std::exp(-2.0 * squeezer.squeezing_parameter());
  const double v_in = eta * v_src + 1.0 - eta;
  const auto freq = frequency_grid(config);
  SqueezingTraces out;
  out.shot = base.shot;
  out.dark = base.dark;
  out.squeezed = with_relative_noise(
      simulate_output_spectrum(config.detector_spec(), config.simulation.lo_power_mw, freq,
                               [&](double) { return v_in; }),
      config.simulation.trace_noise, derive_stream(seed, Stream::kTraceNoise, kSqueezed));
  out.squeezed.label = "squeezed";
  return out;
}

LinearitySweep synthesize_linearity(const ExperimentConfig& config, std::uint64_t seed) {
  const auto& s = config.simulation;
  const auto& d = config.detector;
  // Volts^2 per mW of LO over the detector bandwidth.
  const double per_mw = 2.0 * kElementaryCharge * d.responsivity_a_a_per_w * 1e-3 *
                        d.transimpedance_ohm * d.transimpedance_ohm * d.f3db_hz;
  const double clearance = std::pow(10.0, d.max_clearance_db / 10.0) - 1.0;
  LinearitySweep out;
  out.dark_variance_v2 = per_mw * d.reference_lo_power_mw / clearance;
  Rng rng(derive_stream(seed, Stream::kLinearityNoise));
  const int n = s.linearity_points;
  for (int i = 0; i < n; ++i) {
    const double p =
        s.linearity_min_mw * std::pow(s.linearity_max_mw / s.linearity_min_mw,
                                      static_cast<double>(i) / (n - 1));
    double signal = per_mw * p;
    if (i >= n - s.saturated_points) signal /= 1.0 + p / d.saturation_power_mw;
    out.lo_power_mw.push_back(p);
    out.variance_v2.push_back((out.dark_variance_v2 + signal) *
                              (1.0 + s.linearity_noise * rng.normal()));
  }
  return out;
}

std::string linearity_csv(const LinearitySweep& sweep) {
  std::string out = "# dark_variance_v2=" + fmt(sweep.dark_variance_v2) + "\n";
  out += "lo_power_mw,variance_v2\n";
  for (std::size_t i = 0; i < sweep.lo_power_mw.size(); ++i) {
    out += fmt(sweep.lo_power_mw[i]) + "," + fmt(sweep.variance_v2[i]) + "\n";
  }
  return out;
}

LinearitySweep parse_linearity_csv(std::string_view text) {
  LinearitySweep out;
  bool have_dark = false, have_header = false;
  std::vector<double> row;
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view key = "# dark_variance_v2=";
      if (line.substr(0, key.size()) == key) {
        if (!parse_row(line.substr(key.size()), row, 1, false)) row_error(i + 1, "bad dark variance");
        out.dark_variance_v2 = row[0];
        have_dark = true;
      }
      continue;
    }
    if (!have_header) {
      if (line != "lo_power_mw,variance_v2") {
        row_error(i + 1, "expected header 'lo_power_mw,variance_v2'");
      }
      have_header = true;
      continue;
    }
    if (!parse_row(line, row, 2, false)) row_error(i + 1, "malformed row '" + std::string(line) + "'");
    out.lo_power_mw.push_back(row[0]);
    out.variance_v2.push_back(row[1]);
  }
  if (!have_header) throw Error(ErrorKind::kParseError, "linearity file has no header");
  if (!have_dark) {
    throw Error(ErrorKind::kParseError, "linearity file lacks '# dark_variance_v2=' line");
  }
  return out;
}

std::vector<VariancePair> synthesize_variances(const ExperimentConfig& config,
                                               std::uint64_t seed) {
  Rng rng(derive_stream(seed, Stream::kVarianceNoise));
  const double noise = config.simulation.variance_noise;
  std::vector<VariancePair> out;
  for (double p : config.simulation.pump_powers_mw) {
    auto pair = eq1_forward(config.squeezer.eta_total, config.squeezer.mu_per_sqrt_mw, p);
    *pair.v_max *= 1.0 + noise * rng.normal();
    *pair.v_min *= 1.0 + noise * rng.normal();
    out.push_back(pair);
  }
  return out;
}

std::string variances_csv(const std::vector<VariancePair>& pairs) {
  std::string out = "p_shg_mw,v_max_shotnoise,v_min_shotnoise\n";
  for (const auto& p : pairs) {
    out += fmt(p.p_shg_mw) + "," + (p.v_max ? fmt(*p.v_max) : "") + "," +
           (p.v_min ? fmt(*p.v_min) : "") + "\n";
  }
  return out;
}

std::vector<VariancePair> parse_variances_csv(std::string_view text) {
  std::vector<VariancePair> out;
  bool have_header = false;
  std::vector<double> row;
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      if (line != "p_shg_mw,v_max_shotnoise,v_min_shotnoise") {
        row_error(i + 1, "expected header 'p_shg_mw,v_max_shotnoise,v_min_shotnoise'");
      }
      have_header = true;
      continue;
    }
    if (!parse_row(line, row, 3, true)) row_error(i + 1, "malformed row '" + std::string(line) + "'");
    VariancePair pair;
    pair.p_shg_mw = row[0];
    if (!std::isnan(row[1])) pair.v_max = row[1];
    if (!std::isnan(row[2])) pair.v_min = row[2];
    out.push_back(pair);
  }
  if (!have_header) throw Error(ErrorKind::kParseError, "variance file has no header");
  return out;
}

DensityMatrix true_state(const ExperimentConfig& config, int cutoff) {
  const double r = config.squeezer_spec().squeezing_parameter();
  return lossy_squeezed_vacuum(FockDim(cutoff), SqueezeParams(r, 0.0), config.squeezer.eta_total);
}

}  // namespace homodyne::cli
