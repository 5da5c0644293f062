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

#include <algorithm>
#include <chrono>
#include <iostream>
#include <set>
#include <stdexcept>

namespace jouletrace {

void StopSignal::fire() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (fired_) return;
    fired_ = true;
  }
  cv_.notify_all();
}

bool StopSignal::fired() const {
  std::lock_guard<std::mutex> lock(mu_);
  return fired_;
}

bool StopSignal::wait_until_steady(std::uint64_t deadline_ns) const {
  const auto deadline =
      std::chrono::steady_clock::time_point(std::chrono::nanoseconds(deadline_ns));
  std::unique_lock<std::mutex> lock(mu_);
  return cv_.wait_until(lock, deadline, [this] { return fired_; });
}

namespace {

std::uint64_t steady_now_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

}  // namespace

RealSessionClock::RealSessionClock() {
  steady_base_ns_ = steady_now_ns();
  epoch_base_ms_ = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
}

std::uint64_t RealSessionClock::now_ns() { return steady_now_ns(); }

std::int64_t RealSessionClock::epoch_ms_at(std::uint64_t t_ns) {
  // Project the monotonic instant onto the epoch captured at start, so a
  // wall clock adjustment mid-session cannot reorder rows.
  const auto offset_ns = static_cast<std::int64_t>(t_ns - steady_base_ns_);
  return epoch_base_ms_ + offset_ns / 1000000;
}

bool RealSessionClock::wait_until(std::uint64_t t_ns, StopSignal& stop) {
  return stop.wait_until_steady(t_ns);
}

VirtualSessionClock::VirtualSessionClock(std::uint64_t stop_at_ns,
                                         std::int64_t epoch_base_ms)
    : stop_at_ns_(stop_at_ns), epoch_base_ms_(epoch_base_ms) {}

std::uint64_t VirtualSessionClock::now_ns() { return now_ns_; }

std::int64_t VirtualSessionClock::epoch_ms_at(std::uint64_t t_ns) {
  return epoch_base_ms_ + static_cast<std::int64_t>(t_ns / 1000000);
}

bool VirtualSessionClock::wait_until(std::uint64_t t_ns, StopSignal& stop) {
  if (t_ns < now_ns_) t_ns = now_ns_;
  if (t_ns >= stop_at_ns_) {
    now_ns_ = std::max(now_ns_, stop_at_ns_);
    stop.fire();
    return true;
  }
  now_ns_ = t_ns;
  return stop.fired();
}

void VirtualSessionClock::spend(std::uint64_t delta_ns) {
  now_ns_ = std::min(now_ns_ + delta_ns, stop_at_ns_);
}

std::vector<Probe*> probe_pointers(const ProbeSet& set) {
  std::vector<Probe*> out;
  out.reserve(set.probes.size());
  for (const auto& p : set.probes) out.push_back(p.get());
  return out;
}

namespace {

struct MetricBinding {
  MetricDescriptor descriptor;
  Probe* probe = nullptr;
};

std::vector<MetricBinding> bind_metrics(const SamplerConfig& config,
                                        const std::vector<Probe*>& probes) {
  std::vector<MetricBinding> bindings;
  bindings.reserve(config.metrics.size());
  for (const auto& metric : config.metrics) {
    Probe* owner = nullptr;
    for (Probe* probe : probes) {
      for (const auto& m : probe->capabilities().metrics) {
        if (m.name == metric.name) {
          owner = probe;
          break;
        }
      }
      if (owner) break;
    }
    if (!owner) {
      throw std::invalid_argument("sampler: no probe provides metric " + metric.name);
    }
    bindings.push_back({metric, owner});
  }
  return bindings;
}

void warn_default(const std::string& message) { std::cerr << message << "\n"; }

class SessionState {
 public:
  SessionState(const SamplerConfig& config, const std::vector<Probe*>& probes,
               SessionHooks hooks, SessionClock& clock)
      : bindings_(bind_metrics(config, probes)), hooks_(std::move(hooks)), clock_(clock) {
    if (config.interval < std::chrono::milliseconds(1)) {
      throw std::invalid_argument("sampler: interval must be at least 1 ms");
    }
    if (!hooks_.on_warning) hooks_.on_warning = warn_default;
    trace_.schema = config.metrics;
    trace_.rows.reserve(64);
  }

  void take_sample(std::uint64_t t_ns) {
    Sample sample;
    sample.values.reserve(bindings_.size());
    for (auto& binding : bindings_) {
      sample.values.push_back(read_metric(binding));
    }
    sample.time_ms = clock_.epoch_ms_at(t_ns);
    if (!trace_.rows.empty()) {
      // Delta carries the exact spacing; Time is clamped to stay strictly
      // increasing after millisecond rounding.
      sample.delta_ms = static_cast<double>(t_ns - last_sample_ns_) * 1e-6;
      sample.time_ms = std::max(sample.time_ms, trace_.rows.back().time_ms + 1);
    }
    last_sample_ns_ = t_ns;
    if (hooks_.on_sample) hooks_.on_sample(sample);
    trace_.rows.push_back(std::move(sample));
  }

  std::uint64_t last_sample_ns() const { return last_sample_ns_; }
  Trace take_trace() { return std::move(trace_); }

 private:
  std::optional<double> read_metric(const MetricBinding& binding) {
    try {
      switch (binding.descriptor.kind) {
        case MetricKind::cumulative_energy: {
          const RawCounterReading reading = binding.probe->read_counter(binding.descriptor.name);
          trace_.counter_info.try_emplace(binding.descriptor.name,
                                          CounterInfo{reading.unit_joules, reading.width_bits});
          return static_cast<double>(reading.raw) * reading.unit_joules;
        }
        case MetricKind::instantaneous_power:
          return binding.probe->read_power_watts(binding.descriptor.name);
        case MetricKind::gauge:
          return binding.probe->read_gauge(binding.descriptor.name);
      }
    } catch (const ProbeError& e) {
      if (warned_.insert(binding.descriptor.name).second) {
        hooks_.on_warning("warning: " + binding.descriptor.name + ": " + e.what());
      }
    }
    return std::nullopt;
  }

  Trace trace_;
  std::vector<MetricBinding> bindings_;
  SessionHooks hooks_;
  SessionClock& clock_;
  std::uint64_t last_sample_ns_ = 0;
  std::set<std::string> warned_;
};

}  // namespace

Trace run_session(const SamplerConfig& config, const std::vector<Probe*>& probes,
                  StopSignal& stop, SessionHooks hooks, SessionClock* clock) {
  RealSessionClock real_clock;
  SessionClock& clk = clock ? *clock : real_clock;
  SessionState state(config, probes, std::move(hooks), clk);

  const auto interval_ns =
      static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(config.interval).count());
  const std::uint64_t start_ns = clk.now_ns();
  state.take_sample(start_ns);

  std::uint64_t tick = 1;
  bool stopped = stop.fired();
  while (!stopped) {
    // Absolute deadline per tick; a slow read skips to the next future one.
    std::uint64_t deadline_ns = start_ns + tick * interval_ns;
    const std::uint64_t now = clk.now_ns();
    if (deadline_ns <= now) {
      tick = (now - start_ns) / interval_ns + 1;
      deadline_ns = start_ns + tick * interval_ns;
    }
    stopped = clk.wait_until(deadline_ns, stop);
    if (stopped) break;
    // Rows carry the honest wake instant; the grid only steers scheduling.
    state.take_sample(clk.now_ns());
    ++tick;
  }

  // The stop instant becomes a final row only when a whole interval has
  // passed since the last tick; otherwise the tail is shorter than the
  // sampling resolution and is dropped.
  const std::uint64_t stop_ns = clk.now_ns();
  if (stop_ns - state.last_sample_ns() >= interval_ns) {
    state.take_sample(stop_ns);
  }
  return state.take_trace();
}

}  // namespace jouletrace
