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

#include "jouletrace/sampler.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <doctest.h>

#include "jouletrace/probes/simulated.hpp"

namespace jouletrace {
namespace {

constexpr std::int64_t kEpochBase = 1700000000000;

// Gauge probe whose reads can burn virtual time, modeling a slow sensor.
class SpendingGaugeProbe : public Probe {
 public:
  explicit SpendingGaugeProbe(std::function<void(int)> on_read)
      : on_read_(std::move(on_read)) {
    caps_.metrics = {{"CPU_USAGE_0", Unit::percent, MetricKind::gauge,
                      MetricDomain::core(0)}};
    caps_.origin = ProbeOrigin::simulated;
  }

  std::string name() const override { return "spending-gauge"; }
  const ProbeCapabilities& capabilities() const override { return caps_; }
  RawCounterReading read_counter(const std::string& m) override {
    throw ProbeError("no counter: " + m);
  }
  double read_power_watts(const std::string& m) override {
    throw ProbeError("no power: " + m);
  }
  double read_gauge(const std::string&) override {
    on_read_(++reads_);
    return 42.0;
  }

 private:
  ProbeCapabilities caps_;
  std::function<void(int)> on_read_;
  int reads_ = 0;
};

class FailingGaugeProbe : public Probe {
 public:
  FailingGaugeProbe() {
    caps_.metrics = {{"CPU_USAGE_1", Unit::percent, MetricKind::gauge,
                      MetricDomain::core(1)}};
    caps_.origin = ProbeOrigin::simulated;
  }

  std::string name() const override { return "failing-gauge"; }
  const ProbeCapabilities& capabilities() const override { return caps_; }
  RawCounterReading read_counter(const std::string& m) override {
    throw ProbeError("no counter: " + m);
  }
  double read_power_watts(const std::string& m) override {
    throw ProbeError("no power: " + m);
  }
  double read_gauge(const std::string&) override {
    throw ProbeError("sensor went away");
  }

 private:
  ProbeCapabilities caps_;
};

SamplerConfig config_for(const std::vector<Probe*>& probes, int interval_ms) {
  SamplerConfig config;
  config.interval = std::chrono::milliseconds(interval_ms);
  for (Probe* p : probes) {
    for (const MetricDescriptor& m : p->capabilities().metrics) {
      config.metrics.push_back(m);
    }
  }
  return config;
}

TEST_CASE("a 1.05 s session at 100 ms yields 11 samples") {
  VirtualSessionClock clk(1'050'000'000);
  SimulatedProbeOptions opts;
  opts.now_ns = clk.now_fn();
  SimulatedProbe probe(constant_profile(10.0), opts);

  StopSignal stop;
  Trace trace = run_session(config_for({&probe}, 100), {&probe}, stop, {}, &clk);

  REQUIRE(trace.rows.size() == 11);
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    CHECK(trace.rows[i].time_ms == kEpochBase + static_cast<std::int64_t>(i) * 100);
    CHECK(trace.rows[i].delta_ms == (i == 0 ? 0.0 : 100.0));
  }
  // 10 W for the sampled second: 1 J per interval, 10 J in total.
  RunSummary s = summarize(trace);
  CHECK(s.total_energy_j == doctest::Approx(10.0).epsilon(1e-3));
  CHECK(s.energy_source == "PACKAGE_ENERGY");
  CHECK(trace.counter_info.at("PACKAGE_ENERGY") ==
        CounterInfo{6.103515625e-05, 32});
}

TEST_CASE("a stop before the first deadline leaves the initial sample only") {
  VirtualSessionClock clk(30'000'000);
  SimulatedProbeOptions opts;
  opts.now_ns = clk.now_fn();
  SimulatedProbe probe(constant_profile(10.0), opts);

  StopSignal stop;
  Trace trace = run_session(config_for({&probe}, 100), {&probe}, stop, {}, &clk);
  REQUIRE(trace.rows.size() == 1);
  CHECK(trace.rows[0].delta_ms == 0.0);
  CHECK(trace.rows[0].time_ms == kEpochBase);
}

TEST_CASE("slow reads skip deadlines and the stop tail becomes a final row") {
  VirtualSessionClock clk(850'000'000);
  SimulatedProbeOptions opts;
  opts.now_ns = clk.now_fn();
  SimulatedProbe energy(constant_profile(10.0), opts);
  SpendingGaugeProbe gauge([&](int read) {
    if (read == 6) clk.spend(349'000'000);
  });

  StopSignal stop;
  std::vector<Probe*> probes = {&energy, &gauge};
  Trace trace = run_session(config_for(probes, 100), probes, stop, {}, &clk);

  const std::vector<std::int64_t> expected_ms = {0, 100, 200, 300, 400, 500, 850};
  REQUIRE(trace.rows.size() == expected_ms.size());
  for (std::size_t i = 0; i < expected_ms.size(); ++i) {
    CHECK(trace.rows[i].time_ms == kEpochBase + expected_ms[i]);
  }
  CHECK(trace.rows.back().delta_ms == doctest::Approx(350.0));

  // Skipped deadlines lose no energy: the counter is cumulative.
  CHECK(summarize(trace).total_energy_j == doctest::Approx(8.5).epsilon(1e-3));
}

TEST_CASE("a failing metric yields absent cells and one warning") {
  VirtualSessionClock clk(500'000'000);
  SimulatedProbeOptions opts;
  opts.now_ns = clk.now_fn();
  SimulatedProbe energy(constant_profile(10.0), opts);
  FailingGaugeProbe failing;

  std::vector<std::string> warnings;
  SessionHooks hooks;
  hooks.on_warning = [&](const std::string& w) { warnings.push_back(w); };

  StopSignal stop;
  std::vector<Probe*> probes = {&energy, &failing};
  Trace trace = run_session(config_for(probes, 100), probes, stop, hooks, &clk);

  REQUIRE(trace.rows.size() == 6);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("CPU_USAGE_1") != std::string::npos);
  for (const Sample& row : trace.rows) {
    REQUIRE(row.values.size() == 3);
    CHECK(row.values[0].has_value());
    CHECK_FALSE(row.values[2].has_value());
  }
  // The healthy column is unaffected by its neighbor's failure.
  CHECK(summarize(trace).total_energy_j == doctest::Approx(5.0).epsilon(1e-3));
}

TEST_CASE("every emitted row passes through the sample hook in order") {
  VirtualSessionClock clk(300'000'000);
  SimulatedProbeOptions opts;
  opts.now_ns = clk.now_fn();
  SimulatedProbe probe(constant_profile(2.0), opts);

  std::vector<Sample> streamed;
  SessionHooks hooks;
  hooks.on_sample = [&](const Sample& s) { streamed.push_back(s); };

  StopSignal stop;
  Trace trace = run_session(config_for({&probe}, 100), {&probe}, stop, hooks, &clk);
  CHECK(streamed == trace.rows);
}

TEST_CASE("a metric without a provider is a configuration error") {
  VirtualSessionClock clk(100'000'000);
  SimulatedProbeOptions opts;
  opts.now_ns = clk.now_fn();
  SimulatedProbe probe(constant_profile(2.0), opts);

  SamplerConfig config = config_for({&probe}, 100);
  config.metrics.push_back(
      {"GPU0_POWER", Unit::watts, MetricKind::instantaneous_power, MetricDomain::gpu(0)});
  StopSignal stop;
  CHECK_THROWS_AS(run_session(config, {&probe}, stop, {}, &clk), std::invalid_argument);
}

TEST_CASE("sub-millisecond intervals are rejected") {
  VirtualSessionClock clk(100'000'000);
  SimulatedProbeOptions opts;
  opts.now_ns = clk.now_fn();
  SimulatedProbe probe(constant_profile(2.0), opts);

  SamplerConfig config = config_for({&probe}, 100);
  config.interval = std::chrono::milliseconds(0);
  StopSignal stop;
  CHECK_THROWS_AS(run_session(config, {&probe}, stop, {}, &clk), std::invalid_argument);
}

TEST_CASE("wall-clock sessions stop promptly when the signal fires") {
  SimulatedProbe probe(constant_profile(5.0));
  StopSignal stop;
  std::thread firing([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(60));
    stop.fire();
  });
  Trace trace = run_session(config_for({&probe}, 10), {&probe}, stop);
  firing.join();

  CHECK(trace.rows.size() >= 2);
  CHECK(trace.rows.size() <= 12);
  for (std::size_t i = 1; i < trace.rows.size(); ++i) {
    CHECK(trace.rows[i].time_ms >= trace.rows[i - 1].time_ms + 1);
  }
}

}  // namespace
}  // namespace jouletrace
