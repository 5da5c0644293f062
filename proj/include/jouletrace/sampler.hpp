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

#include <chrono>
#include <functional>
#include <vector>

#include "jouletrace/clock.hpp"
#include "jouletrace/probe.hpp"
#include "jouletrace/trace.hpp"

namespace jouletrace {

struct SamplerConfig {
  std::chrono::milliseconds interval{100};
  std::vector<MetricDescriptor> metrics;  // session schema, fixed for the session
};

struct SessionHooks {
  // Called once per emitted sample, in order. Wire the streaming writer here.
  std::function<void(const Sample&)> on_sample;
  // Per-read failure diagnostics, reported once per failing metric.
  // Defaults to stderr.
  std::function<void(const std::string&)> on_warning;
};

// Polls every metric once immediately, then once per interval at absolute
// deadlines (tick k targets start + k*interval, so a slow read never shifts
// later ticks; missed deadlines are skipped, not back-filled). When the stop
// signal fires at least one interval after the last tick, one final off-grid
// sample is taken so the tail energy is not dropped. A null clock means wall
// time.
//
// Cumulative-energy cells hold the decoded joule value of the raw counter;
// wrap handling happens downstream via the counter parameters recorded in
// the returned trace. A read failure yields an absent cell, never an abort.
Trace run_session(const SamplerConfig& config, const std::vector<Probe*>& probes,
                  StopSignal& stop, SessionHooks hooks = {},
                  SessionClock* clock = nullptr);

// Non-owning view helper for call sites holding a ProbeSet.
std::vector<Probe*> probe_pointers(const ProbeSet& set);

}  // namespace jouletrace
