// Copyright 2026 The JouleTrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jouletrace {

// Tool-level process exit codes, distinct from any wrapped command's own
// code so scripts can always tell them apart.
inline constexpr int kExitUsage = 64;
inline constexpr int kExitSpawnError = 65;
inline constexpr int kExitTimeout = 66;
inline constexpr int kExitInternal = 70;

enum class CliMode { measure, analyze, schedule, probes };

struct CliConfig {
  CliMode mode = CliMode::measure;

  // measure
  int interval_ms = 100;
  unsigned max_execution_s = 0;
  std::optional<std::string> output_path;  // unset: energy.csv on a TTY, else stdout
  std::optional<std::string> command_output_path;
  bool summary = false;
  std::string probe_selection = "auto";  // "auto" or a simulated profile spec
  std::vector<std::string> argv;         // wrapped command, everything after --

  // analyze
  std::string runs_dir;
  std::string baseline = "idle";
  std::string analyze_out_dir;  // empty: next to the runs directory

  // schedule
  std::vector<std::string> conditions;
  int repetitions = 20;
  std::uint64_t seed = 1;
};

// Thrown by parse_args when the process should terminate after parsing:
// either a usage error (kExitUsage) or a help/usage printout (0).
class CliExit : public std::runtime_error {
 public:
  CliExit(int code, const std::string& text) : std::runtime_error(text), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

// args excludes the program name. Everything after the first "--" is the
// wrapped command; flags are only recognized before it.
CliConfig parse_args(const std::vector<std::string>& args);

// Rendered --help text of the measure surface (the default subcommand).
std::string help_text();

int main_measure(const CliConfig& config);
int main_analyze(const CliConfig& config);
int main_schedule(const CliConfig& config);
int main_probes(const CliConfig& config);

// Full entry point: parse, dispatch, map errors to exit codes.
int run_cli(int argc, const char* const* argv);

}  // namespace jouletrace
