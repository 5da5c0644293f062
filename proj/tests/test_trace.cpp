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

#include "jouletrace/trace.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include <doctest.h>

#include "jouletrace/metrics.hpp"

namespace jouletrace {
namespace {

Trace example_energy_trace() {
  Trace t;
  t.schema = {{"PACKAGE_ENERGY", Unit::joules, MetricKind::cumulative_energy,
               MetricDomain::package()},
              {"CPU_USAGE_0", Unit::percent, MetricKind::gauge, MetricDomain::core(0)}};
  t.meta = {{"tool", "jouletrace"}, {"interval_ms", "100"}};
  t.counter_info["PACKAGE_ENERGY"] = CounterInfo{0.1, 32};
  t.rows = {
      {0.0, 1700000000000, {10.0, 50.0}},
      {100.0, 1700000000100, {10.6, 51.5}},
      {100.0, 1700000000200, {11.2, std::nullopt}},
  };
  return t;
}

int parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_csv(in);
  } catch (const TraceParseError& e) {
    return e.line();
  }
  return -1;
}

TEST_CASE("format_double is shortest and exact") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(6.0) == "6");
  CHECK(format_double(0.0) == "0");
  for (double v : {1.0 / 3.0, 6.103515625e-05, 1e300, -2.5e-7, 123456789.123456789}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("a written trace reads back identically") {
  Trace t = example_energy_trace();
  std::ostringstream out;
  write_csv(t, out);
  std::istringstream in(out.str());
  CHECK(read_csv(in) == t);
}

TEST_CASE("serialized form is the documented layout") {
  std::ostringstream out;
  write_csv(example_energy_trace(), out);
  const std::string text = out.str();
  CHECK(text.find("# tool: jouletrace\n") != std::string::npos);
  CHECK(text.find("# column: PACKAGE_ENERGY kind=cumulative_energy unit=joules "
                  "domain=package counter_unit_j=0.1 counter_width=32\n") !=
        std::string::npos);
  CHECK(text.find("# column: CPU_USAGE_0 kind=gauge unit=percent domain=core:0\n") !=
        std::string::npos);
  CHECK(text.find("Delta,Time,PACKAGE_ENERGY (J),CPU_USAGE_0\n") != std::string::npos);
  // An absent cell serializes as an empty field, never as zero.
  CHECK(text.find("100,1700000000200,11.2,\n") != std::string::npos);
}

TEST_CASE("the streaming writer produces the same bytes as write_csv") {
  Trace t = example_energy_trace();
  std::ostringstream whole;
  write_csv(t, whole);

  std::ostringstream streamed;
  TraceWriter writer(streamed, t.schema, t.meta, t.counter_info);
  for (const Sample& row : t.rows) writer.write_row(row);
  CHECK(streamed.str() == whole.str());
}

TEST_CASE("a header-only suffix of a trace is still readable") {
  Trace t = example_energy_trace();
  std::ostringstream out;
  TraceWriter writer(out, t.schema, t.meta, t.counter_info);
  writer.write_row(t.rows[0]);
  std::istringstream in(out.str());
  Trace back = read_csv(in);
  CHECK(back.rows.size() == 1);
  CHECK(back.schema == t.schema);
}

TEST_CASE("metadata-free files infer column roles from the header") {
  std::istringstream in(
      "Delta,Time,PACKAGE_ENERGY (J),SYSTEM_POWER (W),CPU_USAGE_0,CPU_FREQ_1,"
      "GPU0_USAGE,MEMORY_USED\n"
      "0,1000,1.5,10,50,2400,30,1024\n"
      "100,1100,2.5,11,52,2400,31,2048\n");
  Trace t = read_csv(in);
  REQUIRE(t.schema.size() == 6);
  CHECK(t.schema[0].kind == MetricKind::cumulative_energy);
  CHECK(t.schema[0].unit == Unit::joules);
  CHECK(t.schema[0].domain == MetricDomain::package());
  CHECK(t.schema[1].kind == MetricKind::instantaneous_power);
  CHECK(t.schema[1].domain == MetricDomain::system());
  CHECK(t.schema[2].kind == MetricKind::gauge);
  CHECK(t.schema[2].domain == MetricDomain::core(0));
  CHECK(t.schema[3].unit == Unit::megahertz);
  CHECK(t.schema[3].domain == MetricDomain::core(1));
  CHECK(t.schema[4].domain == MetricDomain::gpu(0));
  CHECK(t.schema[5].domain == MetricDomain::memory());
  CHECK(t.schema[5].unit == Unit::bytes);
}

TEST_CASE("malformed rows report their line number") {
  // Wrong cell count.
  CHECK(parse_error_line("Delta,Time,PACKAGE_ENERGY (J)\n0,1000\n") == 2);
  // Non-numeric delta.
  CHECK(parse_error_line("Delta,Time,PACKAGE_ENERGY (J)\nabc,1000,1.5\n") == 2);
  // Non-numeric cell.
  CHECK(parse_error_line("Delta,Time,PACKAGE_ENERGY (J)\n0,1000,x\n") == 2);
  // Time must increase strictly.
  CHECK(parse_error_line(
            "Delta,Time,PACKAGE_ENERGY (J)\n0,1000,1.5\n100,1000,2\n") == 3);
  CHECK(parse_error_line(
            "Delta,Time,PACKAGE_ENERGY (J)\n0,1000,1.5\n100,900,2\n") == 3);
  // Metadata may not follow the header.
  CHECK(parse_error_line(
            "Delta,Time,PACKAGE_ENERGY (J)\n0,1000,1.5\n# late: meta\n") == 3);
  // The header must lead with Delta and Time.
  CHECK(parse_error_line("Time,Delta,PACKAGE_ENERGY (J)\n") == 1);
  // Column metadata must match the header.
  CHECK(parse_error_line("# column: OTHER kind=gauge unit=percent domain=system\n"
                         "Delta,Time,PACKAGE_ENERGY (J)\n0,1000,1\n") == 2);
  CHECK_THROWS_AS(
      { std::istringstream in(""); read_csv(in); }, TraceParseError);
  CHECK_THROWS_AS(
      { std::istringstream in("Delta,Time,X\n"); read_csv(in); }, TraceParseError);
}

TEST_CASE("randomized traces survive the round trip") {
  std::mt19937_64 rng(20260819);
  std::uniform_int_distribution<int> metric_count(1, 5);
  std::uniform_int_distribution<int> row_count(1, 20);
  std::uniform_int_distribution<int> kind_pick(0, 2);
  std::uniform_int_distribution<int> domain_pick(0, 4);
  std::uniform_int_distribution<int> exp_pick(-40, 40);
  std::uniform_int_distribution<int> absent_pick(0, 9);
  std::uniform_int_distribution<std::int64_t> gap_pick(1, 5000);

  auto random_value = [&] {
    return std::ldexp(static_cast<double>(rng() % (1ull << 53)), exp_pick(rng));
  };

  for (int iter = 0; iter < 300; ++iter) {
    Trace t;
    const int n_metrics = metric_count(rng);
    for (int m = 0; m < n_metrics; ++m) {
      MetricDescriptor d;
      d.name = "M" + std::to_string(m) + "_X";
      switch (kind_pick(rng)) {
        case 0:
          d.kind = MetricKind::cumulative_energy;
          d.unit = Unit::joules;
          break;
        case 1:
          d.kind = MetricKind::instantaneous_power;
          d.unit = Unit::watts;
          break;
        default:
          d.kind = MetricKind::gauge;
          d.unit = (rng() % 2 == 0) ? Unit::percent : Unit::megahertz;
          break;
      }
      switch (domain_pick(rng)) {
        case 0: d.domain = MetricDomain::package(); break;
        case 1: d.domain = MetricDomain::core(static_cast<int>(rng() % 64)); break;
        case 2: d.domain = MetricDomain::system(); break;
        case 3: d.domain = MetricDomain::gpu(static_cast<int>(rng() % 8)); break;
        default: d.domain = MetricDomain::memory(); break;
      }
      t.schema.push_back(d);
      if (d.kind == MetricKind::cumulative_energy) {
        const double units[] = {1.0, 6.103515625e-05, 1e-6};
        const unsigned widths[] = {16, 32, 64};
        t.counter_info[d.name] = CounterInfo{units[rng() % 3], widths[rng() % 3]};
      }
    }
    t.meta = {{"seed", std::to_string(iter)}, {"note", "round trip property"}};

    std::int64_t time_ms = 1700000000000;
    const int n_rows = row_count(rng);
    for (int r = 0; r < n_rows; ++r) {
      Sample s;
      s.delta_ms = (r == 0) ? 0.0 : std::abs(random_value());
      s.time_ms = time_ms;
      time_ms += gap_pick(rng);
      for (int m = 0; m < n_metrics; ++m) {
        if (absent_pick(rng) == 0) {
          s.values.emplace_back(std::nullopt);
        } else {
          s.values.emplace_back(random_value());
        }
      }
      t.rows.push_back(std::move(s));
    }

    std::ostringstream out;
    write_csv(t, out);
    std::istringstream in(out.str());
    Trace back = read_csv(in);
    REQUIRE(back == t);
  }
}

TEST_CASE("summarize totals a cumulative package column") {
  Trace t;
  t.schema = {{"PACKAGE_ENERGY", Unit::joules, MetricKind::cumulative_energy,
               MetricDomain::package()}};
  t.counter_info["PACKAGE_ENERGY"] = CounterInfo{0.1, 32};
  t.rows = {{0.0, 0, {10.0}}, {100.0, 100, {10.6}}, {100.0, 200, {11.2}}};
  RunSummary s = summarize(t);
  CHECK(s.duration_s == doctest::Approx(0.2));
  CHECK(s.total_energy_j == doctest::Approx(1.2));
  CHECK(s.avg_power_w == doctest::Approx(6.0));
  CHECK(s.sample_count == 3);
  CHECK(s.energy_source == "PACKAGE_ENERGY");
}

TEST_CASE("summarize is wrap-safe") {
  Trace t;
  t.schema = {{"PACKAGE_ENERGY", Unit::joules, MetricKind::cumulative_energy,
               MetricDomain::package()}};
  t.counter_info["PACKAGE_ENERGY"] = CounterInfo{1.0, 8};  // wraps at 256 J
  t.rows = {{0.0, 0, {250.0}}, {100.0, 100, {4.0}}};
  CHECK(summarize(t).total_energy_j == doctest::Approx(10.0));
}

TEST_CASE("summarize integrates power when no counter exists") {
  Trace t;
  t.schema = {{"SYSTEM_POWER", Unit::watts, MetricKind::instantaneous_power,
               MetricDomain::system()}};
  t.rows = {{0.0, 0, {10.0}}, {1000.0, 1000, {10.0}}, {1000.0, 2000, {10.0}}};
  RunSummary s = summarize(t);
  CHECK(s.total_energy_j == doctest::Approx(20.0));
  CHECK(s.avg_power_w == doctest::Approx(10.0));
  CHECK(s.energy_source == "SYSTEM_POWER");
}

TEST_CASE("summarize bridges absent power cells between readings") {
  Trace t;
  t.schema = {{"SYSTEM_POWER", Unit::watts, MetricKind::instantaneous_power,
               MetricDomain::system()}};
  t.rows = {{0.0, 0, {10.0}}, {1000.0, 1000, {std::nullopt}}, {1000.0, 2000, {10.0}}};
  CHECK(summarize(t).total_energy_j == doctest::Approx(20.0));
}

TEST_CASE("the energy source ladder prefers the package counter") {
  Trace t;
  t.schema = {{"SYSTEM_POWER", Unit::watts, MetricKind::instantaneous_power,
               MetricDomain::system()},
              {"PACKAGE_ENERGY", Unit::joules, MetricKind::cumulative_energy,
               MetricDomain::package()}};
  t.counter_info["PACKAGE_ENERGY"] = CounterInfo{0.1, 32};
  t.rows = {{0.0, 0, {100.0, 10.0}}, {200.0, 200, {100.0, 11.2}}};
  auto src = energy_source(t);
  REQUIRE(src.has_value());
  CHECK(src->name == "PACKAGE_ENERGY");
  CHECK(summarize(t).total_energy_j == doctest::Approx(1.2));

  Trace gpu;
  gpu.schema = {{"GPU0_POWER", Unit::watts, MetricKind::instantaneous_power,
                 MetricDomain::gpu(0)}};
  gpu.rows = {{0.0, 0, {5.0}}, {1000.0, 1000, {5.0}}};
  auto gpu_src = energy_source(gpu);
  REQUIRE(gpu_src.has_value());
  CHECK(gpu_src->name == "GPU0_POWER");
}

TEST_CASE("usage-only traces cannot yield energy") {
  Trace t;
  t.schema = {{"CPU_USAGE_0", Unit::percent, MetricKind::gauge, MetricDomain::core(0)}};
  t.rows = {{0.0, 0, {50.0}}, {100.0, 100, {60.0}}};
  CHECK_FALSE(energy_source(t).has_value());
  CHECK_THROWS_AS(summarize(t), NoEnergySourceError);
}

TEST_CASE("summarize needs at least two rows") {
  Trace t;
  t.schema = {{"SYSTEM_POWER", Unit::watts, MetricKind::instantaneous_power,
               MetricDomain::system()}};
  t.rows = {{0.0, 0, {10.0}}};
  CHECK_THROWS_AS(summarize(t), std::invalid_argument);
}

}  // namespace
}  // namespace jouletrace
