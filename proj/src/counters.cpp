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

#include "jouletrace/counters.hpp"

#include <cmath>
#include <stdexcept>

namespace jouletrace {

std::uint64_t counter_mask(unsigned width_bits) {
  if (width_bits == 0 || width_bits > 64) {
    throw std::invalid_argument("counter width must be 1..64 bits");
  }
  if (width_bits == 64) return ~std::uint64_t{0};
  return (std::uint64_t{1} << width_bits) - 1;
}

double counter_delta_joules(const RawCounterReading& prev, const RawCounterReading& next) {
  if (prev.width_bits != next.width_bits) {
    throw std::invalid_argument("counter readings disagree on width_bits");
  }
  if (prev.unit_joules != next.unit_joules) {
    throw std::invalid_argument("counter readings disagree on unit_joules");
  }
  if (!(next.unit_joules > 0.0)) {
    throw std::invalid_argument("unit_joules must be positive");
  }
  if (next.timestamp_ns < prev.timestamp_ns) {
    throw std::invalid_argument("counter readings out of order");
  }
  const std::uint64_t mask = counter_mask(prev.width_bits);
  if (prev.raw > mask || next.raw > mask) {
    throw std::invalid_argument("raw counter value exceeds declared width");
  }
  // Unsigned subtraction wraps exactly like the hardware counter does.
  const std::uint64_t delta = (next.raw - prev.raw) & mask;
  return static_cast<double>(delta) * next.unit_joules;
}

double rapl_energy_unit_joules(unsigned esu_field) {
  return std::ldexp(1.0, -static_cast<int>(esu_field));
}

}  // namespace jouletrace
