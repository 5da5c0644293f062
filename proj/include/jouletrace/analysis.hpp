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
#include <string>
#include <utility>
#include <vector>

#include "jouletrace/trace.hpp"

namespace jouletrace {

// Power over time for one run, one value per sample index. Cumulative traces
// are differenced, so index i covers the interval ending at row i+1.
struct PowerSeries {
  std::string run_id;
  std::vector<double> watts;
  int interval_ms = 0;
};

// Per-index statistics across runs of one condition, truncated to the
// shortest run.
struct AggregateCurve {
  std::vector<double> mean;
  std::vector<double> q1;
  std::vector<double> q3;
  int n_runs = 0;
  std::size_t length = 0;
  int interval_ms = 0;
};

struct ComparisonReport {
  std::vector<double> mean_diff_w;   // workload minus idle, per index
  double energy_diff_j = 0.0;        // integral of mean_diff_w over time
  double workload_peak_w = 0.0;
  std::size_t workload_peak_index = 0;
  double idle_peak_w = 0.0;
  std::size_t idle_peak_index = 0;
};

// Converts a trace into watts per sample index using its energy-source
// column. Cumulative sources are differenced wrap-safely and the leading
// sample is dropped (no power is defined before the first interval); power
// sources are copied. Gaps from failed reads are bridged at the mean power
// of the gap, which preserves total energy. Throws NoEnergySourceError.
PowerSeries power_series(const Trace& trace, const std::string& run_id = "");

// Percentile by linear interpolation between order statistics: the value at
// rank p/100*(n-1) of the sorted sample. p in [0, 100].
double percentile(std::vector<double> values, double p);

// Per-index mean and interquartile range across at least 2 runs with equal
// intervals. Longer runs are truncated to the shortest.
AggregateCurve aggregate(const std::vector<PowerSeries>& runs);

// Workload against a baseline captured at idle. Both curves must share the
// sampling interval; indexes beyond the shorter curve are ignored.
ComparisonReport compare(const AggregateCurve& workload, const AggregateCurve& idle);

void write_comparison(std::ostream& out, const std::string& workload_label,
                      const std::string& idle_label, const ComparisonReport& report,
                      int interval_ms);

// Measurement order for `repetitions` runs of each condition: a seeded
// uniform shuffle of the multiset, identical across platforms for a fixed
// seed.
std::vector<std::string> randomized_schedule(const std::vector<std::string>& conditions,
                                             int repetitions, std::uint64_t seed);

using LabeledCurves = std::vector<std::pair<std::string, AggregateCurve>>;

// The plot-data serialization, one row per (label, index). emit_plot writes
// its sibling data file through this exact function.
void write_aggregate_csv(std::ostream& out, const LabeledCurves& curves);

// Self-contained SVG: one mean line plus a shaded interquartile band per
// curve, axes in sample indexes and watts. Writes the exact plotted numbers
// to a sibling file at the same path with a .csv extension.
void emit_plot(const LabeledCurves& curves, const std::string& svg_path);

}  // namespace jouletrace
