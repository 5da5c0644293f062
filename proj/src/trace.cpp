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

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "jouletrace/counters.hpp"

namespace jouletrace {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> cells;
  std::string_view::size_type begin = 0;
  while (begin <= line.size()) {
    const auto end = line.find(sep, begin);
    if (end == std::string_view::npos) {
      cells.push_back(line.substr(begin));
      break;
    }
    cells.push_back(line.substr(begin, end - begin));
    begin = end + 1;
  }
  return cells;
}

double parse_cell_double(std::string_view cell, int line_no, const char* what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw TraceParseError(line_no, std::string("bad ") + what + " value '" +
                                       std::string(cell) + "'");
  }
  return value;
}

std::int64_t parse_cell_int(std::string_view cell, int line_no, const char* what) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw TraceParseError(line_no, std::string("bad ") + what + " value '" +
                                       std::string(cell) + "'");
  }
  return value;
}

void write_meta_and_header(std::ostream& out, const std::vector<MetricDescriptor>& schema,
                           const std::vector<std::pair<std::string, std::string>>& meta,
                           const std::map<std::string, CounterInfo>& counter_info) {
  for (const auto& [key, value] : meta) {
    if (key == "column") {
      throw std::invalid_argument("trace meta key 'column' is reserved");
    }
    out << "# " << key << ": " << value << "\n";
  }
  for (const auto& m : schema) {
    out << "# column: " << m.name << " kind=" << kind_name(m.kind)
        << " unit=" << unit_name(m.unit) << " domain=" << domain_name(m.domain);
    if (const auto it = counter_info.find(m.name); it != counter_info.end()) {
      out << " counter_unit_j=" << format_double(it->second.unit_joules)
          << " counter_width=" << it->second.width_bits;
    }
    out << "\n";
  }
  out << "Delta,Time";
  for (const auto& m : schema) out << "," << column_name(m);
  out << "\n";
}

void write_row_line(std::ostream& out, const Sample& sample, std::size_t column_count) {
  if (sample.values.size() != column_count) {
    throw std::invalid_argument("trace row has " + std::to_string(sample.values.size()) +
                                " cells, schema has " + std::to_string(column_count));
  }
  out << format_double(sample.delta_ms) << "," << sample.time_ms;
  for (const auto& value : sample.values) {
    out << ",";
    if (value) out << format_double(*value);
  }
  out << "\n";
}

// Column roles for files written without the metadata preamble. The unit
// suffix fixes the kind; the name pattern narrows the domain.
MetricDescriptor infer_descriptor(std::string_view column) {
  MetricDescriptor m;
  m.name = metric_name_from_column(column);
  const bool joules = column.size() > 4 && column.substr(column.size() - 4) == " (J)";
  const bool watts = column.size() > 4 && column.substr(column.size() - 4) == " (W)";

  const auto trailing_index = [](std::string_view name) -> std::optional<int> {
    const auto pos = name.find_last_of('_');
    if (pos == std::string_view::npos || pos + 1 >= name.size()) return std::nullopt;
    int idx = 0;
    const auto* begin = name.data() + pos + 1;
    const auto* end = name.data() + name.size();
    auto [ptr, ec] = std::from_chars(begin, end, idx);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return idx;
  };
  const auto leading_gpu_index = [](std::string_view name) -> std::optional<int> {
    if (name.substr(0, 3) != "GPU") return std::nullopt;
    int idx = 0;
    const auto* begin = name.data() + 3;
    const auto* end = name.data() + name.size();
    auto [ptr, ec] = std::from_chars(begin, end, idx);
    if (ec != std::errc{} || ptr == begin) return std::nullopt;
    return idx;
  };

  if (auto gpu = leading_gpu_index(m.name)) {
    m.domain = MetricDomain::gpu(*gpu);
  } else if (m.name.find("SYSTEM") != std::string::npos) {
    m.domain = MetricDomain::system();
  } else if (m.name.find("MEMORY") != std::string::npos) {
    m.domain = MetricDomain::memory();
  } else if (auto core = trailing_index(m.name)) {
    m.domain = MetricDomain::core(*core);
  } else {
    m.domain = MetricDomain::package();
  }

  if (joules) {
    m.kind = MetricKind::cumulative_energy;
    m.unit = Unit::joules;
  } else if (watts) {
    m.kind = MetricKind::instantaneous_power;
    m.unit = Unit::watts;
  } else {
    m.kind = MetricKind::gauge;
    if (m.domain.tag == MetricDomain::Tag::memory) {
      m.unit = Unit::bytes;
    } else if (m.name.find("FREQ") != std::string::npos) {
      m.unit = Unit::megahertz;
    } else {
      m.unit = Unit::percent;
    }
  }
  return m;
}

struct ColumnMeta {
  MetricDescriptor descriptor;
  std::optional<CounterInfo> counter;
};

ColumnMeta parse_column_meta(std::string_view body, int line_no) {
  ColumnMeta meta;
  const auto tokens = split(body, ' ');
  if (tokens.empty() || tokens[0].empty()) {
    throw TraceParseError(line_no, "column metadata is missing the metric name");
  }
  meta.descriptor.name = std::string(tokens[0]);
  double counter_unit = 0.0;
  unsigned counter_width = 0;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (tokens[i].empty()) continue;
    const auto eq = tokens[i].find('=');
    if (eq == std::string_view::npos) {
      throw TraceParseError(line_no, "column metadata token '" + std::string(tokens[i]) +
                                         "' is not key=value");
    }
    const auto key = tokens[i].substr(0, eq);
    const auto value = tokens[i].substr(eq + 1);
    if (key == "kind") {
      const auto kind = kind_from_name(value);
      if (!kind) throw TraceParseError(line_no, "unknown kind '" + std::string(value) + "'");
      meta.descriptor.kind = *kind;
    } else if (key == "unit") {
      const auto unit = unit_from_name(value);
      if (!unit) throw TraceParseError(line_no, "unknown unit '" + std::string(value) + "'");
      meta.descriptor.unit = *unit;
    } else if (key == "domain") {
      const auto domain = domain_from_name(value);
      if (!domain) {
        throw TraceParseError(line_no, "unknown domain '" + std::string(value) + "'");
      }
      meta.descriptor.domain = *domain;
    } else if (key == "counter_unit_j") {
      counter_unit = parse_cell_double(value, line_no, "counter unit");
    } else if (key == "counter_width") {
      counter_width =
          static_cast<unsigned>(parse_cell_int(value, line_no, "counter width"));
    } else {
      throw TraceParseError(line_no, "unknown column attribute '" + std::string(key) + "'");
    }
  }
  if (counter_unit > 0 && counter_width > 0) {
    meta.counter = CounterInfo{counter_unit, counter_width};
  } else if (counter_unit > 0 || counter_width > 0) {
    throw TraceParseError(line_no, "counter_unit_j and counter_width must appear together");
  }
  return meta;
}

const MetricDescriptor* pick_energy_source(const Trace& trace) {
  const auto find = [&](auto&& pred) -> const MetricDescriptor* {
    for (const auto& m : trace.schema) {
      if (pred(m)) return &m;
    }
    return nullptr;
  };
  if (const auto* m = find([](const MetricDescriptor& m) {
        return m.kind == MetricKind::cumulative_energy &&
               m.domain.tag == MetricDomain::Tag::package;
      })) {
    return m;
  }
  if (const auto* m = find([](const MetricDescriptor& m) {
        return m.kind == MetricKind::instantaneous_power &&
               m.domain.tag == MetricDomain::Tag::system;
      })) {
    return m;
  }
  return find([](const MetricDescriptor& m) {
    return m.domain.tag == MetricDomain::Tag::gpu &&
           (m.kind == MetricKind::cumulative_energy ||
            m.kind == MetricKind::instantaneous_power);
  });
}

std::size_t column_index(const Trace& trace, const std::string& name) {
  for (std::size_t i = 0; i < trace.schema.size(); ++i) {
    if (trace.schema[i].name == name) return i;
  }
  throw std::invalid_argument("trace has no column " + name);
}

// Sum of wrap-safe counter deltas across present cells. Without counter
// parameters falls back to plain differences, treating a negative step as a
// counter reset that contributes nothing.
double cumulative_total_joules(const Trace& trace, const MetricDescriptor& metric) {
  const std::size_t col = column_index(trace, metric.name);
  const CounterInfo* info = nullptr;
  if (const auto it = trace.counter_info.find(metric.name); it != trace.counter_info.end()) {
    info = &it->second;
  }
  double total = 0.0;
  std::optional<RawCounterReading> prev;
  std::optional<double> prev_value;
  for (const auto& row : trace.rows) {
    const auto& cell = row.values[col];
    if (!cell) continue;
    if (info) {
      RawCounterReading reading;
      reading.raw = static_cast<std::uint64_t>(std::llround(*cell / info->unit_joules));
      reading.width_bits = info->width_bits;
      reading.unit_joules = info->unit_joules;
      reading.timestamp_ns = static_cast<std::uint64_t>(row.time_ms) * 1000000u;
      if (prev) total += counter_delta_joules(*prev, reading);
      prev = reading;
    } else {
      if (prev_value && *cell >= *prev_value) total += *cell - *prev_value;
      prev_value = *cell;
    }
  }
  return total;
}

double trapezoid_total_joules(const Trace& trace, const MetricDescriptor& metric) {
  const std::size_t col = column_index(trace, metric.name);
  double total = 0.0;
  std::optional<double> prev_watts;
  std::int64_t prev_time_ms = 0;
  for (const auto& row : trace.rows) {
    const auto& cell = row.values[col];
    if (!cell) continue;
    if (prev_watts) {
      const double dt_s = static_cast<double>(row.time_ms - prev_time_ms) / 1000.0;
      total += 0.5 * (*prev_watts + *cell) * dt_s;
    }
    prev_watts = *cell;
    prev_time_ms = row.time_ms;
  }
  return total;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

TraceWriter::TraceWriter(std::ostream& out, const std::vector<MetricDescriptor>& schema,
                         const std::vector<std::pair<std::string, std::string>>& meta,
                         const std::map<std::string, CounterInfo>& counter_info)
    : out_(out), column_count_(schema.size()) {
  write_meta_and_header(out_, schema, meta, counter_info);
  out_.flush();
}

void TraceWriter::write_row(const Sample& sample) {
  write_row_line(out_, sample, column_count_);
  out_.flush();
}

void write_csv(const Trace& trace, std::ostream& out) {
  write_meta_and_header(out, trace.schema, trace.meta, trace.counter_info);
  for (const auto& row : trace.rows) write_row_line(out, row, trace.schema.size());
}

void write_csv(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(trace, out);
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

Trace read_csv(std::istream& in) {
  Trace trace;
  std::vector<std::optional<CounterInfo>> column_counters;
  bool have_column_meta = false;
  bool have_header = false;
  std::string line;
  int line_no = 0;
  std::int64_t prev_time_ms = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && !have_header) continue;

    if (!line.empty() && line[0] == '#') {
      if (have_header) {
        throw TraceParseError(line_no, "metadata after the header row");
      }
      std::string_view body(line);
      body.remove_prefix(1);
      if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      const auto colon = body.find(": ");
      if (colon == std::string_view::npos) continue;  // plain comment
      const auto key = body.substr(0, colon);
      const auto value = body.substr(colon + 2);
      if (key == "column") {
        auto column = parse_column_meta(value, line_no);
        trace.schema.push_back(std::move(column.descriptor));
        column_counters.push_back(column.counter);
        have_column_meta = true;
      } else {
        trace.meta.emplace_back(std::string(key), std::string(value));
      }
      continue;
    }

    const auto cells = split(line, ',');
    if (!have_header) {
      if (cells.size() < 2 || cells[0] != "Delta" || cells[1] != "Time") {
        throw TraceParseError(line_no, "header must start with Delta,Time");
      }
      if (have_column_meta) {
        if (cells.size() - 2 != trace.schema.size()) {
          throw TraceParseError(line_no, "header has " + std::to_string(cells.size() - 2) +
                                             " metric columns, metadata declared " +
                                             std::to_string(trace.schema.size()));
        }
        for (std::size_t i = 0; i < trace.schema.size(); ++i) {
          if (cells[i + 2] != column_name(trace.schema[i])) {
            throw TraceParseError(line_no, "header column '" + std::string(cells[i + 2]) +
                                               "' does not match metadata column '" +
                                               column_name(trace.schema[i]) + "'");
          }
        }
      } else {
        for (std::size_t i = 2; i < cells.size(); ++i) {
          trace.schema.push_back(infer_descriptor(cells[i]));
        }
      }
      have_header = true;
      continue;
    }

    if (line.empty()) continue;
    if (cells.size() != trace.schema.size() + 2) {
      throw TraceParseError(line_no, "row has " + std::to_string(cells.size()) +
                                         " cells, header has " +
                                         std::to_string(trace.schema.size() + 2));
    }
    Sample sample;
    sample.delta_ms = parse_cell_double(cells[0], line_no, "Delta");
    sample.time_ms = parse_cell_int(cells[1], line_no, "Time");
    if (!trace.rows.empty() && sample.time_ms <= prev_time_ms) {
      throw TraceParseError(line_no, "Time is not strictly increasing");
    }
    prev_time_ms = sample.time_ms;
    sample.values.reserve(trace.schema.size());
    for (std::size_t i = 2; i < cells.size(); ++i) {
      if (cells[i].empty()) {
        sample.values.push_back(std::nullopt);
      } else {
        sample.values.push_back(parse_cell_double(cells[i], line_no, "metric"));
      }
    }
    trace.rows.push_back(std::move(sample));
  }

  if (!have_header) throw TraceParseError(line_no, "missing header row");
  if (trace.rows.empty()) throw TraceParseError(line_no, "trace has no data rows");
  for (std::size_t i = 0; i < column_counters.size(); ++i) {
    if (column_counters[i]) {
      trace.counter_info.emplace(trace.schema[i].name, *column_counters[i]);
    }
  }
  return trace;
}

Trace read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

std::optional<MetricDescriptor> energy_source(const Trace& trace) {
  const MetricDescriptor* source = pick_energy_source(trace);
  if (!source) return std::nullopt;
  return *source;
}

RunSummary summarize(const Trace& trace) {
  if (trace.rows.size() < 2) {
    throw std::invalid_argument("summary requires at least 2 samples");
  }
  const MetricDescriptor* source = pick_energy_source(trace);
  if (!source) throw NoEnergySourceError();

  RunSummary summary;
  summary.sample_count = trace.rows.size();
  summary.duration_s =
      static_cast<double>(trace.rows.back().time_ms - trace.rows.front().time_ms) / 1000.0;
  summary.energy_source = source->name;
  summary.total_energy_j = source->kind == MetricKind::cumulative_energy
                               ? cumulative_total_joules(trace, *source)
                               : trapezoid_total_joules(trace, *source);
  summary.avg_power_w = summary.total_energy_j / summary.duration_s;
  return summary;
}

}  // namespace jouletrace
