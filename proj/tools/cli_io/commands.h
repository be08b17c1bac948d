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

#ifndef HOMODYNE_TOOLS_COMMANDS_H_
#define HOMODYNE_TOOLS_COMMANDS_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.h"

namespace homodyne::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitNumerical = 3;

// Where a command writes. Every artefact goes to `out_dir`; `threads` only
// changes scheduling, never output bytes.
class RunContext {
 public:
  RunContext(std::filesystem::path out_dir, int threads, std::ostream& progress);

  const std::filesystem::path& out_dir() const { return out_dir_; }
  int threads() const { return threads_; }
  std::ostream& progress() const { return progress_; }

  void write(const std::string& name, const std::string& content) const;
  // Appends a line to run.log, flushed by finish().
  void log(const std::string& line);
  void finish() const;

 private:
  std::filesystem::path out_dir_;
  int threads_;
  std::ostream& progress_;
  std::vector<std::string> log_;
};

void cmd_characterise(const ExperimentConfig& config, RunContext& ctx);
void cmd_squeeze_scan(const ExperimentConfig& config, RunContext& ctx);
void cmd_fit_eq1(const ExperimentConfig& config, RunContext& ctx);
void cmd_simulate_samples(const ExperimentConfig& config, RunContext& ctx);
void cmd_tomography(const ExperimentConfig& config, RunContext& ctx);

// Parses arguments, runs one command and returns the exit code. Failures are
// reported as a JSON object on `err` and, when possible, in error.json.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace homodyne::cli

#endif  // HOMODYNE_TOOLS_COMMANDS_H_
