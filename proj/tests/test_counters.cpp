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

#include <cstdint>
#include <random>
#include <stdexcept>

#include <doctest.h>

namespace jouletrace {
namespace {

RawCounterReading reading(std::uint64_t raw, unsigned width, double unit,
                          std::uint64_t ts) {
  RawCounterReading r;
  r.raw = raw;
  r.width_bits = width;
  r.unit_joules = unit;
  r.timestamp_ns = ts;
  return r;
}

// Reference implementation: advance the counter one tick at a time and count
// the ticks. Only usable for small gaps, which is why the randomized pairs
// below keep their distance bounded.
double stepped_delta_joules(std::uint64_t prev, std::uint64_t next, unsigned width,
                            double unit) {
  const std::uint64_t mask = counter_mask(width);
  std::uint64_t cur = prev & mask;
  std::uint64_t ticks = 0;
  while (cur != (next & mask)) {
    cur = (cur + 1) & mask;
    ++ticks;
  }
  return static_cast<double>(ticks) * unit;
}

TEST_CASE("counter_mask covers widths 1 through 64") {
  CHECK(counter_mask(1) == 0x1u);
  CHECK(counter_mask(8) == 0xFFu);
  CHECK(counter_mask(32) == 0xFFFFFFFFull);
  CHECK(counter_mask(64) == ~0ull);
  CHECK_THROWS_AS(counter_mask(0), std::invalid_argument);
  CHECK_THROWS_AS(counter_mask(65), std::invalid_argument);
}

TEST_CASE("energy status unit decodes as a power of two") {
  CHECK(rapl_energy_unit_joules(0) == 1.0);
  CHECK(rapl_energy_unit_joules(14) == 6.103515625e-05);
  CHECK(rapl_energy_unit_joules(16) == 1.52587890625e-05);
}

TEST_CASE("delta across a 32-bit wrap is exact") {
  auto prev = reading(0xFFFFFFF0ull, 32, 1.0, 0);
  auto next = reading(0x10ull, 32, 1.0, 1);
  CHECK(counter_delta_joules(prev, next) == 32.0);
}

TEST_CASE("identical readings consume nothing") {
  auto prev = reading(12345, 32, 0.5, 0);
  auto next = reading(12345, 32, 0.5, 7);
  CHECK(counter_delta_joules(prev, next) == 0.0);
}

TEST_CASE("full-range jump matches the closed form") {
  for (unsigned width : {8u, 16u, 32u, 64u}) {
    const std::uint64_t mask = counter_mask(width);
    auto prev = reading(0, width, 1.0, 0);
    auto next = reading(mask, width, 1.0, 1);
    CHECK(counter_delta_joules(prev, next) == static_cast<double>(mask));
  }
}

TEST_CASE("randomized pairs agree with the one-tick reference") {
  std::mt19937_64 rng(0x4A6F756C65ull);
  const double units[] = {1.0, 6.103515625e-05, 1e-6};
  const unsigned widths[] = {16, 32, 64};
  std::uniform_int_distribution<std::uint64_t> gap(0, 1000);

  for (int i = 0; i < 10000; ++i) {
    const unsigned width = widths[i % 3];
    const double unit = units[(i / 3) % 3];
    const std::uint64_t mask = counter_mask(width);
    // Half the pairs start near the top of the range so the wrap path is
    // exercised constantly, not incidentally.
    std::uint64_t prev =
        (i % 2 == 0) ? (mask - gap(rng)) & mask : rng() & mask;
    std::uint64_t next = (prev + gap(rng)) & mask;
    auto a = reading(prev, width, unit, 0);
    auto b = reading(next, width, unit, 1);
    CHECK(counter_delta_joules(a, b) == stepped_delta_joules(prev, next, width, unit));
  }
}

TEST_CASE("mismatched or corrupt readings are rejected") {
  auto base = reading(10, 32, 1.0, 5);
  CHECK_THROWS_AS(counter_delta_joules(base, reading(11, 16, 1.0, 6)),
                  std::invalid_argument);
  CHECK_THROWS_AS(counter_delta_joules(base, reading(11, 32, 0.5, 6)),
                  std::invalid_argument);
  CHECK_THROWS_AS(counter_delta_joules(base, reading(11, 32, 1.0, 4)),
                  std::invalid_argument);
  auto oversized = reading(0x1FFFFFFFFull, 32, 1.0, 6);
  CHECK_THROWS_AS(counter_delta_joules(base, oversized), std::invalid_argument);
  auto nonpositive_unit = reading(10, 32, 0.0, 5);
  CHECK_THROWS_AS(counter_delta_joules(nonpositive_unit, reading(11, 32, 0.0, 6)),
                  std::invalid_argument);
}

}  // namespace
}  // namespace jouletrace
