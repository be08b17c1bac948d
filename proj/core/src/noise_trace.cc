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

#include "homodyne/noise_trace.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "homodyne/error.h"

namespace homodyne {
namespace {

bool parse_double(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0' && std::isfinite(out);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void NoiseTrace::validate() const {
  if (freq_hz.size() != power_dbm.size()) {
    throw Error(ErrorKind::kInvalidArgument, "noise trace arrays differ in length");
  }
  for (std::size_t i = 1; i < freq_hz.size(); ++i) {
    if (!(freq_hz[i] > freq_hz[i - 1])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "noise trace frequencies must be strictly increasing");
    }
  }
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

NoiseTrace apply_cable_correction(const NoiseTrace& trace,
                                  std::span<const double> correction_db) {
  if (correction_db.size() != trace.size()) {
    throw Error(ErrorKind::kGridMismatch, "cable correction length differs from trace");
  }
  NoiseTrace out = trace;
  for (std::size_t i = 0; i < out.size(); ++i) out.power_dbm[i] += correction_db[i];
  return out;
}

bool same_grid(const NoiseTrace& a, const NoiseTrace& b) {
  return a.freq_hz == b.freq_hz;
}

NoiseTrace parse_noise_trace_csv(std::string_view text) {
  NoiseTrace trace;
  bool have_header = false;
  bool has_correction = false;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line = trim(std::string(text.substr(pos, end - pos)));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(body.substr(0, eq));
      const std::string value = trim(body.substr(eq + 1));
      if (key == "rbw_hz") {
        if (!parse_double(value, trace.rbw_hz)) {
          throw Error(ErrorKind::kParseError,
                      "line " + std::to_string(line_no) + ": bad rbw_hz '" + value + "'");
        }
      } else if (key == "label") {
        trace.label = value;
      }
      continue;
    }
    if (!have_header) {
      if (line == "freq_hz,power_dbm") {
        has_correction = false;
      } else if (line == "freq_hz,power_dbm,cable_loss_db") {
        has_correction = true;
      } else {
        throw Error(ErrorKind::kParseError,
                    "line " + std::to_string(line_no) +
                        ": expected header 'freq_hz,power_dbm'");
      }
      have_header = true;
      continue;
    }
    const auto fields = split(line, ',');
    double f = 0.0, p = 0.0, c = 0.0;
    const bool ok = fields.size() == (has_correction ? 3u : 2u) &&
                    parse_double(trim(fields[0]), f) && parse_double(trim(fields[1]), p) &&
                    (!has_correction || parse_double(trim(fields[2]), c));
    if (!ok) {
      throw Error(ErrorKind::kParseError,
                  "line " + std::to_string(line_no) + ": malformed trace row '" + line + "'");
    }
    trace.freq_hz.push_back(f);
    trace.power_dbm.push_back(p + c);
  }
  if (!have_header) throw Error(ErrorKind::kParseError, "trace file has no header");
  try {
    trace.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kParseError, e.what());
  }
  return trace;
}

std::string noise_trace_csv(const NoiseTrace& trace) {
  std::string out;
  char line[96];
  std::snprintf(line, sizeof(line), "# rbw_hz=%.10g\n", trace.rbw_hz);
  out += line;
  if (!trace.label.empty()) out += "# label=" + trace.label + "\n";
  out += "freq_hz,power_dbm\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", trace.freq_hz[i], trace.power_dbm[i]);
    out += line;
  }
  return out;
}

}  // namespace homodyne
