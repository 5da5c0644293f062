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

#include <condition_variable>
#include <cstdint>
#include <mutex>

namespace jouletrace {

// One-shot session terminator. Settable from any thread exactly once;
// repeated fires are ignored.
class StopSignal {
 public:
  void fire();
  bool fired() const;

  // Blocks until the signal fires or the steady-clock deadline passes.
  // Returns true when the signal fired.
  bool wait_until_steady(std::uint64_t deadline_ns) const;

 private:
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  bool fired_ = false;
};

// Time source for a sampling session. now_ns is the monotonic session
// timeline; epoch_ms stamps rows with wall-clock time. Both derive from the
// same underlying instant so row timestamps and deltas never disagree.
class SessionClock {
 public:
  virtual ~SessionClock() = default;

  virtual std::uint64_t now_ns() = 0;
  virtual std::int64_t epoch_ms_at(std::uint64_t t_ns) = 0;

  // Blocks until t_ns or until the stop signal fires, whichever is first.
  // Returns true when the stop signal fired.
  virtual bool wait_until(std::uint64_t t_ns, StopSignal& stop) = 0;
};

// Wall time. The epoch base is captured once at construction, so a wall
// clock step mid-session cannot corrupt the trace timeline.
class RealSessionClock final : public SessionClock {
 public:
  RealSessionClock();

  std::uint64_t now_ns() override;
  std::int64_t epoch_ms_at(std::uint64_t t_ns) override;
  bool wait_until(std::uint64_t t_ns, StopSignal& stop) override;

 private:
  std::uint64_t steady_base_ns_ = 0;
  std::int64_t epoch_base_ms_ = 0;
};

// Manual time for deterministic sessions: waiting advances the clock
// instantly, and the stop signal fires exactly at stop_at_ns. Single-threaded
// by design; drive probes from the same instance via now_fn().
class VirtualSessionClock final : public SessionClock {
 public:
  explicit VirtualSessionClock(std::uint64_t stop_at_ns,
                               std::int64_t epoch_base_ms = 1700000000000);

  std::uint64_t now_ns() override;
  std::int64_t epoch_ms_at(std::uint64_t t_ns) override;
  bool wait_until(std::uint64_t t_ns, StopSignal& stop) override;

  // Advances the clock by delta_ns, saturating at the stop time. Models a
  // slow probe read between ticks.
  void spend(std::uint64_t delta_ns);

  // Adapter for SimulatedProbeOptions::now_ns.
  auto now_fn() {
    return [this] { return now_ns(); };
  }

 private:
  std::uint64_t now_ns_ = 0;
  std::uint64_t stop_at_ns_;
  std::int64_t epoch_base_ms_;
};

}  // namespace jouletrace
