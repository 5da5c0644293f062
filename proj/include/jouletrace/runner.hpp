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

#include <optional>
#include <string>
#include <vector>

#include "jouletrace/clock.hpp"

namespace jouletrace {

struct RunSpec {
  // Command and arguments, exec'd directly with no shell interpretation.
  std::vector<std::string> argv;
  // Wall-clock budget in seconds; 0 means run to natural completion.
  unsigned max_execution_s = 0;
  // When set, child stdout and stderr are written interleaved to this file,
  // byte for byte. Otherwise both pass through (see redirect_fd).
  std::optional<std::string> command_output_path;
  // Without an output path: when >= 0, child stdout+stderr are redirected to
  // this open descriptor; when < 0 the child inherits the parent's streams.
  int redirect_fd = -1;
};

enum class RunStatus { exited, timed_out, spawn_error };

struct RunOutcome {
  RunStatus status = RunStatus::exited;
  // Child's code on natural exit; 128+signal when the child died of one.
  int exit_code = 0;
  std::string error;  // diagnostic for spawn_error
};

// Spawns spec.argv in its own process group, enforces the timeout (graceful
// termination, then a forced kill of the whole group after a 2 s grace
// period), and fires the stop signal once the child is fully reaped, on
// every path including spawn failure.
RunOutcome execute(const RunSpec& spec, StopSignal& stop);

}  // namespace jouletrace
