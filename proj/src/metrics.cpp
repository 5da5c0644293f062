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

#include "jouletrace/metrics.hpp"

#include <charconv>

namespace jouletrace {

bool is_valid_metric_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

bool is_well_formed(const MetricDescriptor& m) {
  if (!is_valid_metric_name(m.name)) return false;
  if (m.kind == MetricKind::cumulative_energy && m.unit != Unit::joules) return false;
  if (m.kind == MetricKind::instantaneous_power && m.unit != Unit::watts) return false;
  return true;
}

std::string_view unit_name(Unit u) {
  switch (u) {
    case Unit::joules: return "joules";
    case Unit::watts: return "watts";
    case Unit::megahertz: return "megahertz";
    case Unit::percent: return "percent";
    case Unit::bytes: return "bytes";
    case Unit::celsius: return "celsius";
  }
  return "unknown";
}

std::optional<Unit> unit_from_name(std::string_view s) {
  if (s == "joules") return Unit::joules;
  if (s == "watts") return Unit::watts;
  if (s == "megahertz") return Unit::megahertz;
  if (s == "percent") return Unit::percent;
  if (s == "bytes") return Unit::bytes;
  if (s == "celsius") return Unit::celsius;
  return std::nullopt;
}

std::string_view kind_name(MetricKind k) {
  switch (k) {
    case MetricKind::cumulative_energy: return "cumulative_energy";
    case MetricKind::instantaneous_power: return "instantaneous_power";
    case MetricKind::gauge: return "gauge";
  }
  return "unknown";
}

std::optional<MetricKind> kind_from_name(std::string_view s) {
  if (s == "cumulative_energy") return MetricKind::cumulative_energy;
  if (s == "instantaneous_power") return MetricKind::instantaneous_power;
  if (s == "gauge") return MetricKind::gauge;
  return std::nullopt;
}

std::string domain_name(const MetricDomain& d) {
  switch (d.tag) {
    case MetricDomain::Tag::package: return "package";
    case MetricDomain::Tag::core: return "core:" + std::to_string(d.index);
    case MetricDomain::Tag::system: return "system";
    case MetricDomain::Tag::gpu: return "gpu:" + std::to_string(d.index);
    case MetricDomain::Tag::memory: return "memory";
  }
  return "unknown";
}

std::optional<MetricDomain> domain_from_name(std::string_view s) {
  if (s == "package") return MetricDomain::package();
  if (s == "system") return MetricDomain::system();
  if (s == "memory") return MetricDomain::memory();
  const auto parse_indexed = [&](std::string_view prefix) -> std::optional<int> {
    if (s.size() <= prefix.size() || s.substr(0, prefix.size()) != prefix) return std::nullopt;
    int idx = 0;
    const auto* begin = s.data() + prefix.size();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, idx);
    if (ec != std::errc{} || ptr != end || idx < 0) return std::nullopt;
    return idx;
  };
  if (auto k = parse_indexed("core:")) return MetricDomain::core(*k);
  if (auto k = parse_indexed("gpu:")) return MetricDomain::gpu(*k);
  return std::nullopt;
}

std::string column_name(const MetricDescriptor& m) {
  switch (m.unit) {
    case Unit::joules: return m.name + " (J)";
    case Unit::watts: return m.name + " (W)";
    default: return m.name;
  }
}

std::string metric_name_from_column(std::string_view column) {
  for (std::string_view suffix : {" (J)", " (W)"}) {
    if (column.size() > suffix.size() &&
        column.substr(column.size() - suffix.size()) == suffix) {
      return std::string(column.substr(0, column.size() - suffix.size()));
    }
  }
  return std::string(column);
}

}  // namespace jouletrace
