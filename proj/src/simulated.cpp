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

#include "jouletrace/probes/simulated.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace jouletrace {

namespace {

constexpr char kEnergyMetric[] = "PACKAGE_ENERGY";
constexpr char kPowerMetric[] = "SYSTEM_POWER";

class ConstantProfile final : public PowerProfile {
 public:
  explicit ConstantProfile(double watts) : watts_(watts) {
    if (watts < 0) throw std::invalid_argument("constant profile: negative power");
  }
  double power_watts(double) const override { return watts_; }
  double energy_joules(double t_s) const override { return watts_ * t_s; }

 private:
  double watts_;
};

class StepProfile final : public PowerProfile {
 public:
  StepProfile(double switch_s, double before_w, double after_w)
      : switch_s_(switch_s), before_w_(before_w), after_w_(after_w) {
    if (switch_s < 0) throw std::invalid_argument("step profile: negative switch time");
    if (before_w < 0 || after_w < 0) {
      throw std::invalid_argument("step profile: negative power");
    }
  }
  double power_watts(double t_s) const override {
    return t_s < switch_s_ ? before_w_ : after_w_;
  }
  double energy_joules(double t_s) const override {
    if (t_s <= switch_s_) return before_w_ * t_s;
    return before_w_ * switch_s_ + after_w_ * (t_s - switch_s_);
  }

 private:
  double switch_s_;
  double before_w_;
  double after_w_;
};

class SinusoidProfile final : public PowerProfile {
 public:
  SinusoidProfile(double base_w, double amplitude_w, double period_s)
      : base_w_(base_w), amplitude_w_(amplitude_w), period_s_(period_s) {
    if (period_s <= 0) throw std::invalid_argument("sinusoid profile: period must be positive");
    if (amplitude_w < 0 || amplitude_w > base_w) {
      throw std::invalid_argument("sinusoid profile: amplitude must be in [0, base]");
    }
  }
  double power_watts(double t_s) const override {
    return base_w_ + amplitude_w_ * std::sin(2.0 * std::numbers::pi * t_s / period_s_);
  }
  double energy_joules(double t_s) const override {
    const double omega = 2.0 * std::numbers::pi / period_s_;
    return base_w_ * t_s + amplitude_w_ / omega * (1.0 - std::cos(omega * t_s));
  }

 private:
  double base_w_;
  double amplitude_w_;
  double period_s_;
};

class PiecewiseProfile final : public PowerProfile {
 public:
  explicit PiecewiseProfile(std::vector<std::pair<double, double>> points)
      : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("piecewise profile: no points");
    double prev_t = -1.0;
    for (const auto& [t, w] : points_) {
      if (t < 0) throw std::invalid_argument("piecewise profile: negative time");
      if (t <= prev_t) {
        throw std::invalid_argument("piecewise profile: times must be strictly increasing");
      }
      if (w < 0) throw std::invalid_argument("piecewise profile: negative power");
      prev_t = t;
    }
    // Prefix integral at each knot. Before the first knot power is clamped
    // to the first value, so the first prefix is already nonzero.
    prefix_.resize(points_.size());
    prefix_[0] = points_[0].second * points_[0].first;
    for (std::size_t i = 1; i < points_.size(); ++i) {
      const auto& [t0, w0] = points_[i - 1];
      const auto& [t1, w1] = points_[i];
      prefix_[i] = prefix_[i - 1] + 0.5 * (w0 + w1) * (t1 - t0);
    }
  }

  double power_watts(double t_s) const override {
    if (t_s <= points_.front().first) return points_.front().second;
    if (t_s >= points_.back().first) return points_.back().second;
    const std::size_t i = segment_index(t_s);
    const auto& [t0, w0] = points_[i];
    const auto& [t1, w1] = points_[i + 1];
    return w0 + (w1 - w0) * (t_s - t0) / (t1 - t0);
  }

  double energy_joules(double t_s) const override {
    if (t_s <= points_.front().first) return points_.front().second * t_s;
    if (t_s >= points_.back().first) {
      return prefix_.back() + points_.back().second * (t_s - points_.back().first);
    }
    const std::size_t i = segment_index(t_s);
    const double t0 = points_[i].first;
    const double w0 = points_[i].second;
    return prefix_[i] + 0.5 * (w0 + power_watts(t_s)) * (t_s - t0);
  }

 private:
  std::size_t segment_index(double t_s) const {
    auto it = std::upper_bound(points_.begin(), points_.end(), t_s,
                               [](double t, const auto& p) { return t < p.first; });
    return static_cast<std::size_t>(it - points_.begin()) - 1;
  }

  std::vector<std::pair<double, double>> points_;
  std::vector<double> prefix_;
};

std::uint64_t steady_now_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

double parse_double(const std::string& text, const char* what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw std::invalid_argument(std::string("probe spec: bad number for ") + what + ": '" +
                                text + "'");
  }
  return value;
}

std::vector<std::pair<double, double>> load_profile_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("probe spec: cannot open profile file: " + path);
  std::vector<std::pair<double, double>> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("profile file: line " + std::to_string(line_no) +
                                  ": expected 'seconds,watts'");
    }
    points.emplace_back(parse_double(line.substr(0, comma), "profile time"),
                        parse_double(line.substr(comma + 1), "profile power"));
  }
  return points;
}

}  // namespace

std::unique_ptr<PowerProfile> constant_profile(double watts) {
  return std::make_unique<ConstantProfile>(watts);
}

std::unique_ptr<PowerProfile> step_profile(double switch_s, double before_w, double after_w) {
  return std::make_unique<StepProfile>(switch_s, before_w, after_w);
}

std::unique_ptr<PowerProfile> sinusoid_profile(double base_w, double amplitude_w,
                                               double period_s) {
  return std::make_unique<SinusoidProfile>(base_w, amplitude_w, period_s);
}

std::unique_ptr<PowerProfile> piecewise_profile(
    std::vector<std::pair<double, double>> points) {
  return std::make_unique<PiecewiseProfile>(std::move(points));
}

SimulatedProbe::SimulatedProbe(std::unique_ptr<PowerProfile> profile,
                               SimulatedProbeOptions options)
    : profile_(std::move(profile)), options_(std::move(options)) {
  if (!profile_) throw std::invalid_argument("simulated probe: null profile");
  if (!options_.now_ns) options_.now_ns = steady_now_ns;
  if (options_.unit_joules <= 0) {
    throw std::invalid_argument("simulated probe: counter unit must be positive");
  }
  if (options_.width_bits < 1 || options_.width_bits > 64) {
    throw std::invalid_argument("simulated probe: counter width out of range");
  }
  start_ns_ = options_.now_ns();
  capabilities_.metrics = {
      {kEnergyMetric, Unit::joules, MetricKind::cumulative_energy, MetricDomain::package()},
      {kPowerMetric, Unit::watts, MetricKind::instantaneous_power, MetricDomain::system()},
  };
  capabilities_.platform = host_platform();
  capabilities_.cpu_vendor = detect_host_cpu_vendor();
  capabilities_.origin = ProbeOrigin::simulated;
}

std::string SimulatedProbe::name() const { return "simulated"; }

const ProbeCapabilities& SimulatedProbe::capabilities() const { return capabilities_; }

double SimulatedProbe::seconds_since_start(std::uint64_t now) const {
  return static_cast<double>(now - start_ns_) * 1e-9;
}

RawCounterReading SimulatedProbe::read_counter(const std::string& metric) {
  if (metric != kEnergyMetric) {
    throw ProbeError("simulated probe: unknown counter metric: " + metric);
  }
  const std::uint64_t now = options_.now_ns();
  const double energy = profile_->energy_joules(seconds_since_start(now));
  const auto ticks = static_cast<std::uint64_t>(std::floor(energy / options_.unit_joules));
  RawCounterReading reading;
  reading.raw = ticks & counter_mask(options_.width_bits);
  reading.width_bits = options_.width_bits;
  reading.unit_joules = options_.unit_joules;
  reading.timestamp_ns = now;
  return reading;
}

double SimulatedProbe::read_power_watts(const std::string& metric) {
  if (metric != kPowerMetric) {
    throw ProbeError("simulated probe: unknown power metric: " + metric);
  }
  return profile_->power_watts(seconds_since_start(options_.now_ns()));
}

double SimulatedProbe::read_gauge(const std::string& metric) {
  throw ProbeError("simulated probe: unknown gauge metric: " + metric);
}

std::unique_ptr<SimulatedProbe> parse_simulated_probe(const std::string& spec) {
  std::vector<std::string> parts;
  std::string::size_type begin = 0;
  while (begin <= spec.size()) {
    const auto end = spec.find(':', begin);
    if (end == std::string::npos) {
      parts.push_back(spec.substr(begin));
      break;
    }
    parts.push_back(spec.substr(begin, end - begin));
    begin = end + 1;
  }
  if (parts.empty() || parts[0] != "simulated") {
    throw std::invalid_argument("probe spec: expected 'simulated:...', got '" + spec + "'");
  }
  if (parts.size() < 2 || parts[1].empty()) {
    throw std::invalid_argument("probe spec: missing profile kind");
  }

  SimulatedProbeOptions options;
  std::vector<std::string> args;
  for (std::size_t i = 2; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) {
      args.push_back(parts[i]);
      continue;
    }
    const std::string key = parts[i].substr(0, eq);
    const std::string value = parts[i].substr(eq + 1);
    if (key == "unit") {
      options.unit_joules = parse_double(value, "counter unit");
    } else if (key == "width") {
      options.width_bits = static_cast<unsigned>(parse_double(value, "counter width"));
    } else {
      throw std::invalid_argument("probe spec: unknown option '" + key + "'");
    }
  }

  auto expect_args = [&](std::size_t n) {
    if (args.size() != n) {
      throw std::invalid_argument("probe spec: profile '" + parts[1] + "' takes " +
                                  std::to_string(n) + " arguments, got " +
                                  std::to_string(args.size()));
    }
  };

  std::unique_ptr<PowerProfile> profile;
  if (parts[1] == "constant") {
    expect_args(1);
    profile = constant_profile(parse_double(args[0], "watts"));
  } else if (parts[1] == "step") {
    expect_args(3);
    profile = step_profile(parse_double(args[0], "switch seconds"),
                           parse_double(args[1], "before watts"),
                           parse_double(args[2], "after watts"));
  } else if (parts[1] == "sinusoid") {
    expect_args(3);
    profile = sinusoid_profile(parse_double(args[0], "base watts"),
                               parse_double(args[1], "amplitude watts"),
                               parse_double(args[2], "period seconds"));
  } else if (parts[1] == "file") {
    // A path may itself contain ':', so rejoin the positional segments.
    if (args.empty()) throw std::invalid_argument("probe spec: missing profile file path");
    std::string path = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) path += ":" + args[i];
    profile = piecewise_profile(load_profile_points(path));
  } else {
    throw std::invalid_argument("probe spec: unknown profile '" + parts[1] + "'");
  }
  return std::make_unique<SimulatedProbe>(std::move(profile), std::move(options));
}

}  // namespace jouletrace
