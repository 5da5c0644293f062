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

namespace jouletrace {

/// One raw read of a cumulative energy counter, together with everything
/// needed to decode it: the counter width (it wraps at 2^width_bits) and the
/// joules-per-unit scale.
struct RawCounterReading {
  std::uint64_t raw = 0;
  unsigned width_bits = 32;
  double unit_joules = 1.0;
  std::uint64_t timestamp_ns = 0;  // monotonic clock

  bool operator==(const RawCounterReading&) const = default;
};

/// Bit mask with the low `width_bits` bits set. width_bits must be 1..64.
std::uint64_t counter_mask(unsigned width_bits);

/// Energy consumed between two reads of the same counter:
/// ((next.raw - prev.raw) mod 2^width_bits) * unit_joules.
/// Correct across at most one counter wraparound. Throws std::invalid_argument
/// if the readings disagree on width/unit, run backwards in time, or hold a
/// raw value wider than the declared width.
double counter_delta_joules(const RawCounterReading& prev, const RawCounterReading& next);

/// RAPL energy-status-unit decode: joules per counter unit = 2^(-esu).
double rapl_energy_unit_joules(unsigned esu_field);

}  // namespace jouletrace
