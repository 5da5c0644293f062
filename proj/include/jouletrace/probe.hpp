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

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "jouletrace/capabilities.hpp"
#include "jouletrace/counters.hpp"
#include "jouletrace/metrics.hpp"

namespace jouletrace {

// Raised by probe reads when a sensor that was advertised at detection time
// fails afterwards (permission revoked, device gone, transient I/O error).
class ProbeError : public std::runtime_error {
 public:
  explicit ProbeError(const std::string& what) : std::runtime_error(what) {}
};

// One source of metrics. A probe advertises a fixed metric set at detection
// time; reads are keyed by metric name and must stay within that set.
class Probe {
 public:
  virtual ~Probe() = default;

  virtual std::string name() const = 0;
  virtual const ProbeCapabilities& capabilities() const = 0;

  // For MetricKind::cumulative_energy metrics only.
  virtual RawCounterReading read_counter(const std::string& metric) = 0;

  // For MetricKind::instantaneous_power metrics only.
  virtual double read_power_watts(const std::string& metric) = 0;

  // For MetricKind::gauge metrics only.
  virtual double read_gauge(const std::string& metric) = 0;
};

// Probes picked for a session plus any detection-time diagnostics. Detection
// never fails hard: an empty probe list with warnings is a valid outcome.
struct ProbeSet {
  std::vector<std::unique_ptr<Probe>> probes;
  std::vector<std::string> warnings;

  // Union of all probe metrics in probe order. Column order of the trace.
  std::vector<MetricDescriptor> schema() const;
};

// Enumerates every usable metric source on this machine, in a deterministic
// order: package energy (MSR, else the OS power capping interface), system
// power, GPU, then OS gauges (per-core usage and frequency, memory).
ProbeSet detect_probes();

// Builder for the synthetic probe. `spec` is the value of --probe, e.g.
// "simulated:constant:10" or "simulated:sinusoid:10:4:2". Returns nullptr
// when `spec` does not start with "simulated", throws on a malformed spec.
std::unique_ptr<Probe> make_simulated_probe(const std::string& spec);

}  // namespace jouletrace
