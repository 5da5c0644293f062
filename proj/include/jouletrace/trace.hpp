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
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jouletrace/metrics.hpp"

namespace jouletrace {

// One sampling tick. `values` is aligned to the session schema: values[i]
// belongs to schema[i], and a failed read is an absent optional, never zero.
struct Sample {
  double delta_ms = 0.0;      // elapsed since the previous sample; first is 0
  std::int64_t time_ms = 0;   // Unix epoch milliseconds
  std::vector<std::optional<double>> values;

  bool operator==(const Sample&) const = default;
};

// Decode parameters of the hardware counter behind a cumulative column.
// Needed to reconstruct wrap-safe deltas from decoded joule values.
struct CounterInfo {
  double unit_joules = 1.0;
  unsigned width_bits = 32;

  bool operator==(const CounterInfo&) const = default;
};

struct Trace {
  std::vector<MetricDescriptor> schema;               // column order after Delta, Time
  std::vector<Sample> rows;
  std::vector<std::pair<std::string, std::string>> meta;  // ordered key/value comments
  std::map<std::string, CounterInfo> counter_info;    // keyed by cumulative metric name

  bool operator==(const Trace&) const = default;
};

struct RunSummary {
  double duration_s = 0.0;
  double total_energy_j = 0.0;
  double avg_power_w = 0.0;
  std::size_t sample_count = 0;
  std::string energy_source;  // metric name the totals came from
};

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Raised by summarize when no column can yield energy. Callers degrade to a
// usage-only report.
class NoEnergySourceError : public std::runtime_error {
 public:
  NoEnergySourceError() : std::runtime_error("trace has no energy-capable column") {}
};

// Streaming CSV writer. Metadata and header go out at construction, each row
// is flushed as written, so an interrupted run leaves a readable prefix.
class TraceWriter {
 public:
  TraceWriter(std::ostream& out, const std::vector<MetricDescriptor>& schema,
              const std::vector<std::pair<std::string, std::string>>& meta,
              const std::map<std::string, CounterInfo>& counter_info);

  void write_row(const Sample& sample);

 private:
  std::ostream& out_;
  std::size_t column_count_;
};

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

void write_csv(const Trace& trace, std::ostream& out);
void write_csv(const Trace& trace, const std::string& path);

// Accepts files with or without the `#` metadata preamble. Without metadata,
// column roles are inferred from the header suffix: " (J)" marks a cumulative
// energy column, " (W)" instantaneous power, anything else a gauge.
Trace read_csv(std::istream& in);
Trace read_csv(const std::string& path);

// Energy source ladder: package cumulative energy, else system power, else
// a GPU column. Empty when the trace cannot yield energy at all.
std::optional<MetricDescriptor> energy_source(const Trace& trace);

// Totals from the energy-source column. Cumulative columns are summed
// wrap-safely via their counter parameters; power columns are integrated
// with the trapezoidal rule. Throws NoEnergySourceError, or
// std::invalid_argument for traces with fewer than 2 rows.
RunSummary summarize(const Trace& trace);

}  // namespace jouletrace
