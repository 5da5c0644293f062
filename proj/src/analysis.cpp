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

#include "jouletrace/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "jouletrace/counters.hpp"

namespace jouletrace {

namespace {

std::size_t find_column(const Trace& trace, const std::string& name) {
  for (std::size_t i = 0; i < trace.schema.size(); ++i) {
    if (trace.schema[i].name == name) return i;
  }
  throw std::invalid_argument("trace has no column " + name);
}

int infer_interval_ms(const Trace& trace) {
  for (const auto& [key, value] : trace.meta) {
    if (key == "interval_ms") {
      try {
        return std::stoi(value);
      } catch (const std::exception&) {
        break;
      }
    }
  }
  // No recorded configuration; the median row spacing is robust against one
  // off-grid final row.
  std::vector<double> deltas;
  deltas.reserve(trace.rows.size());
  for (std::size_t i = 1; i < trace.rows.size(); ++i) {
    deltas.push_back(trace.rows[i].delta_ms);
  }
  if (deltas.empty()) return 0;
  auto mid = deltas.begin() + deltas.size() / 2;
  std::nth_element(deltas.begin(), mid, deltas.end());
  return static_cast<int>(std::llround(*mid));
}

void check_watts(double w) {
  if (!std::isfinite(w) || w < 0) {
    throw std::invalid_argument("power series values must be finite and non-negative");
  }
}

// Differences a cumulative column into per-slot watts. Slot i spans rows
// i..i+1. A gap of absent cells is filled with the mean power across the
// gap, so the series still integrates to the column's total energy.
std::vector<double> difference_cumulative(const Trace& trace, const MetricDescriptor& metric,
                                          std::size_t col) {
  const CounterInfo* info = nullptr;
  if (const auto it = trace.counter_info.find(metric.name); it != trace.counter_info.end()) {
    info = &it->second;
  }

  const std::size_t slots = trace.rows.size() - 1;
  std::vector<double> watts(slots, -1.0);

  std::optional<std::size_t> prev_row;
  for (std::size_t r = 0; r < trace.rows.size(); ++r) {
    const auto& cell = trace.rows[r].values[col];
    if (!cell) continue;
    if (prev_row) {
      const auto& prev = trace.rows[*prev_row];
      double delta_j = 0.0;
      if (info) {
        RawCounterReading a, b;
        a.raw = static_cast<std::uint64_t>(std::llround(*prev.values[col] / info->unit_joules));
        b.raw = static_cast<std::uint64_t>(std::llround(*cell / info->unit_joules));
        a.width_bits = b.width_bits = info->width_bits;
        a.unit_joules = b.unit_joules = info->unit_joules;
        a.timestamp_ns = static_cast<std::uint64_t>(prev.time_ms) * 1000000u;
        b.timestamp_ns = static_cast<std::uint64_t>(trace.rows[r].time_ms) * 1000000u;
        delta_j = counter_delta_joules(a, b);
      } else {
        delta_j = std::max(0.0, *cell - *prev.values[col]);
      }
      const double dt_s =
          static_cast<double>(trace.rows[r].time_ms - prev.time_ms) / 1000.0;
      const double mean_w = delta_j / dt_s;
      for (std::size_t s = *prev_row; s < r; ++s) watts[s] = mean_w;
    }
    prev_row = r;
  }

  // Slots before the first or after the last reading carry the nearest
  // defined power, keeping every run aligned by sample index.
  double first_defined = -1.0;
  for (auto it = watts.rbegin(); it != watts.rend(); ++it) {
    if (*it >= 0) first_defined = *it;
  }
  if (first_defined < 0) {
    throw std::invalid_argument("column " + metric.name + " has fewer than 2 readings");
  }
  double carry = first_defined;
  for (auto& w : watts) {
    if (w < 0) {
      w = carry;
    } else {
      carry = w;
    }
  }
  for (double w : watts) check_watts(w);
  return watts;
}

// Copies a power column, interpolating absent cells linearly in time and
// carrying the nearest value across leading and trailing gaps.
std::vector<double> copy_power(const Trace& trace, std::size_t col) {
  const std::size_t n = trace.rows.size();
  std::vector<double> watts(n, -1.0);
  std::optional<std::size_t> prev_row;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& cell = trace.rows[r].values[col];
    if (!cell) continue;
    check_watts(*cell);
    watts[r] = *cell;
    if (prev_row && r - *prev_row > 1) {
      const double t0 = static_cast<double>(trace.rows[*prev_row].time_ms);
      const double t1 = static_cast<double>(trace.rows[r].time_ms);
      const double w0 = watts[*prev_row];
      for (std::size_t g = *prev_row + 1; g < r; ++g) {
        const double t = static_cast<double>(trace.rows[g].time_ms);
        watts[g] = w0 + (*cell - w0) * (t - t0) / (t1 - t0);
      }
    }
    prev_row = r;
  }
  if (!prev_row) {
    throw std::invalid_argument("power column has no readings");
  }
  // One backward pass reaches both gaps: the trailing one takes the last
  // reading, the leading one ends up with the first.
  double carry = watts[*prev_row];
  for (auto it = watts.rbegin(); it != watts.rend(); ++it) {
    if (*it < 0) {
      *it = carry;
    } else {
      carry = *it;
    }
  }
  for (double w : watts) check_watts(w);
  return watts;
}

std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
  // Rejection keeps the draw uniform; the distribution classes in the
  // standard library are not bit-identical across implementations.
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

}  // namespace

PowerSeries power_series(const Trace& trace, const std::string& run_id) {
  if (trace.rows.size() < 2) {
    throw std::invalid_argument("power series requires at least 2 samples");
  }
  const auto source = energy_source(trace);
  if (!source) throw NoEnergySourceError();

  PowerSeries series;
  series.run_id = run_id;
  series.interval_ms = infer_interval_ms(trace);
  const std::size_t col = find_column(trace, source->name);
  series.watts = source->kind == MetricKind::cumulative_energy
                     ? difference_cumulative(trace, *source, col)
                     : copy_power(trace, col);
  return series;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty sample");
  if (p < 0 || p > 100) throw std::invalid_argument("percentile must be in [0, 100]");
  std::sort(values.begin(), values.end());
  const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  const double frac = rank - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

AggregateCurve aggregate(const std::vector<PowerSeries>& runs) {
  if (runs.size() < 2) {
    throw std::invalid_argument("aggregate requires at least 2 runs");
  }
  AggregateCurve curve;
  curve.n_runs = static_cast<int>(runs.size());
  curve.interval_ms = runs.front().interval_ms;
  curve.length = runs.front().watts.size();
  for (const auto& run : runs) {
    if (run.interval_ms != curve.interval_ms) {
      throw std::invalid_argument("aggregate requires equal sampling intervals");
    }
    curve.length = std::min(curve.length, run.watts.size());
  }
  if (curve.length == 0) {
    throw std::invalid_argument("aggregate requires non-empty runs");
  }
  curve.mean.reserve(curve.length);
  curve.q1.reserve(curve.length);
  curve.q3.reserve(curve.length);
  std::vector<double> column(runs.size());
  for (std::size_t i = 0; i < curve.length; ++i) {
    double sum = 0.0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      column[r] = runs[r].watts[i];
      sum += column[r];
    }
    curve.mean.push_back(sum / static_cast<double>(runs.size()));
    curve.q1.push_back(percentile(column, 25.0));
    curve.q3.push_back(percentile(column, 75.0));
  }
  return curve;
}

ComparisonReport compare(const AggregateCurve& workload, const AggregateCurve& idle) {
  if (workload.interval_ms != idle.interval_ms) {
    throw std::invalid_argument("compare requires equal sampling intervals");
  }
  ComparisonReport report;
  const std::size_t n = std::min(workload.length, idle.length);
  report.mean_diff_w.reserve(n);
  const double dt_s = static_cast<double>(workload.interval_ms) / 1000.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = workload.mean[i] - idle.mean[i];
    report.mean_diff_w.push_back(diff);
    report.energy_diff_j += diff * dt_s;
  }
  const auto peak = [](const AggregateCurve& curve, double& watts, std::size_t& index) {
    if (curve.mean.empty()) return;
    const auto it = std::max_element(curve.mean.begin(), curve.mean.end());
    watts = *it;
    index = static_cast<std::size_t>(it - curve.mean.begin());
  };
  peak(workload, report.workload_peak_w, report.workload_peak_index);
  peak(idle, report.idle_peak_w, report.idle_peak_index);
  return report;
}

void write_comparison(std::ostream& out, const std::string& workload_label,
                      const std::string& idle_label, const ComparisonReport& report,
                      int interval_ms) {
  const std::size_t n = report.mean_diff_w.size();
  out << "condition comparison: " << workload_label << " vs " << idle_label << "\n";
  out << "samples compared: " << n << " (interval " << interval_ms << " ms)\n";
  out << "energy difference: " << format_double(report.energy_diff_j) << " J\n";
  if (n > 0) {
    out << "mean power difference: "
        << format_double(report.energy_diff_j /
                         (static_cast<double>(n) * interval_ms / 1000.0))
        << " W\n";
  }
  out << "peak power (" << workload_label << "): " << format_double(report.workload_peak_w)
      << " W at index " << report.workload_peak_index << "\n";
  out << "peak power (" << idle_label << "): " << format_double(report.idle_peak_w)
      << " W at index " << report.idle_peak_index << "\n";
  out << "\nindex,mean_diff_w\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << i << "," << format_double(report.mean_diff_w[i]) << "\n";
  }
}

std::vector<std::string> randomized_schedule(const std::vector<std::string>& conditions,
                                             int repetitions, std::uint64_t seed) {
  if (conditions.empty()) throw std::invalid_argument("schedule requires conditions");
  if (repetitions < 1) throw std::invalid_argument("schedule requires repetitions >= 1");
  std::vector<std::string> plan;
  plan.reserve(conditions.size() * static_cast<std::size_t>(repetitions));
  for (int r = 0; r < repetitions; ++r) {
    plan.insert(plan.end(), conditions.begin(), conditions.end());
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = plan.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(bounded_draw(rng, i + 1));
    std::swap(plan[i], plan[j]);
  }
  return plan;
}

void write_aggregate_csv(std::ostream& out, const LabeledCurves& curves) {
  out << "label,index,mean_w,q1_w,q3_w\n";
  for (const auto& [label, curve] : curves) {
    for (std::size_t i = 0; i < curve.length; ++i) {
      out << label << "," << i << "," << format_double(curve.mean[i]) << ","
          << format_double(curve.q1[i]) << "," << format_double(curve.q3[i]) << "\n";
    }
  }
}

}  // namespace jouletrace
