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

#include <optional>
#include <string>
#include <string_view>

namespace jouletrace {

enum class Unit { joules, watts, megahertz, percent, bytes, celsius };

/// How a metric's values evolve over time. Cumulative energy counters grow
/// monotonically (modulo counter wrap); power readings are point-in-time.
enum class MetricKind { cumulative_energy, instantaneous_power, gauge };

/// Hardware scope a metric is attached to. `index` is meaningful for the
/// core and gpu tags only.
struct MetricDomain {
  enum class Tag { package, core, system, gpu, memory };

  Tag tag = Tag::system;
  int index = 0;

  static MetricDomain package() { return {Tag::package, 0}; }
  static MetricDomain core(int k) { return {Tag::core, k}; }
  static MetricDomain system() { return {Tag::system, 0}; }
  static MetricDomain gpu(int k) { return {Tag::gpu, k}; }
  static MetricDomain memory() { return {Tag::memory, 0}; }

  bool operator==(const MetricDomain&) const = default;
};

/// Identity of one measured quantity. `name` doubles as the CSV column name
/// (modulo the unit suffix, see column_name) and must match [A-Z0-9_]+.
struct MetricDescriptor {
  std::string name;
  Unit unit = Unit::percent;
  MetricKind kind = MetricKind::gauge;
  MetricDomain domain;

  bool operator==(const MetricDescriptor&) const = default;
};

bool is_valid_metric_name(std::string_view name);

/// Checks the name grammar and the kind/unit pairing rules
/// (cumulative_energy => joules, instantaneous_power => watts).
bool is_well_formed(const MetricDescriptor& m);

std::string_view unit_name(Unit u);
std::optional<Unit> unit_from_name(std::string_view s);
std::string_view kind_name(MetricKind k);
std::optional<MetricKind> kind_from_name(std::string_view s);
std::string domain_name(const MetricDomain& d);
std::optional<MetricDomain> domain_from_name(std::string_view s);

/// CSV header cell for a metric. Energy columns carry " (J)", power columns
/// " (W)"; all other units are written bare, e.g. "CPU_USAGE_0".
std::string column_name(const MetricDescriptor& m);

/// Strips the unit suffix a column_name may carry, returning the metric name.
std::string metric_name_from_column(std::string_view column);

}  // namespace jouletrace
