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
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "jouletrace/probe.hpp"

namespace jouletrace {

// A synthetic power draw as a function of session-relative time. Profiles are
// never negative, so the accumulated energy is monotone and a wrapping
// counter can represent it.
class PowerProfile {
 public:
  virtual ~PowerProfile() = default;

  virtual double power_watts(double t_s) const = 0;

  // Exact integral of power_watts over [0, t_s], in joules.
  virtual double energy_joules(double t_s) const = 0;
};

std::unique_ptr<PowerProfile> constant_profile(double watts);
std::unique_ptr<PowerProfile> step_profile(double switch_s, double before_w, double after_w);
// power(t) = base + amplitude * sin(2*pi*t / period). Requires amplitude <= base.
std::unique_ptr<PowerProfile> sinusoid_profile(double base_w, double amplitude_w,
                                               double period_s);
// Piecewise-linear interpolation through (seconds, watts) points, clamped to
// the first and last point outside their range.
std::unique_ptr<PowerProfile> piecewise_profile(
    std::vector<std::pair<double, double>> points);

struct SimulatedProbeOptions {
  double unit_joules = 6.103515625e-05;  // 2^-14, typical hardware granularity
  unsigned width_bits = 32;
  // Session time source. Defaults to the steady clock; tests inject a manual
  // clock to take time out of the picture.
  std::function<std::uint64_t()> now_ns;
};

// Deterministic probe backed by an analytic power profile. Exposes the same
// two faces a real package sensor pair would: a wrapping energy counter
// (PACKAGE_ENERGY) and an instantaneous power read (SYSTEM_POWER).
class SimulatedProbe : public Probe {
 public:
  SimulatedProbe(std::unique_ptr<PowerProfile> profile, SimulatedProbeOptions options = {});

  std::string name() const override;
  const ProbeCapabilities& capabilities() const override;
  RawCounterReading read_counter(const std::string& metric) override;
  double read_power_watts(const std::string& metric) override;
  double read_gauge(const std::string& metric) override;

  // Ground truth for tests: exact accumulated energy at session time t_s.
  double exact_energy_joules(double t_s) const { return profile_->energy_joules(t_s); }

 private:
  double seconds_since_start(std::uint64_t now) const;

  std::unique_ptr<PowerProfile> profile_;
  SimulatedProbeOptions options_;
  ProbeCapabilities capabilities_;
  std::uint64_t start_ns_ = 0;
};

// Parses a probe spec of the form
//   simulated:constant:<watts>
//   simulated:step:<switch_s>:<before_w>:<after_w>
//   simulated:sinusoid:<base_w>:<amplitude_w>:<period_s>
//   simulated:file:<path>         (CSV lines "seconds,watts")
// with optional trailing ":unit=<joules>" and ":width=<bits>" segments.
// Throws std::invalid_argument on a malformed spec.
std::unique_ptr<SimulatedProbe> parse_simulated_probe(const std::string& spec);

}  // namespace jouletrace
