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

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "probes_internal.hpp"

namespace jouletrace::internal {

namespace {

std::uint64_t steady_now_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

struct CpuTimes {
  std::uint64_t busy = 0;
  std::uint64_t total = 0;
};

// OS bookkeeping gauges: per-core usage and frequency plus memory. One
// snapshot of the kernel tables serves all reads within a tick (reads come
// in bursts, one burst per sampling tick).
class SysinfoProbe final : public Probe {
 public:
  SysinfoProbe(int cores, bool with_frequency) : cores_(cores) {
    capabilities_.platform = Platform::linux_os;
    capabilities_.cpu_vendor = detect_host_cpu_vendor();
    capabilities_.origin = ProbeOrigin::hardware;
    for (int k = 0; k < cores_; ++k) {
      capabilities_.metrics.push_back({"CPU_USAGE_" + std::to_string(k), Unit::percent,
                                       MetricKind::gauge, MetricDomain::core(k)});
    }
    if (with_frequency) {
      for (int k = 0; k < cores_; ++k) {
        capabilities_.metrics.push_back({"CPU_FREQUENCY_" + std::to_string(k),
                                         Unit::megahertz, MetricKind::gauge,
                                         MetricDomain::core(k)});
      }
    }
    capabilities_.metrics.push_back(
        {"USED_MEMORY", Unit::bytes, MetricKind::gauge, MetricDomain::memory()});
    capabilities_.metrics.push_back(
        {"TOTAL_MEMORY", Unit::bytes, MetricKind::gauge, MetricDomain::memory()});
    prev_times_.resize(static_cast<std::size_t>(cores_));
    usage_.assign(static_cast<std::size_t>(cores_), 0.0);
  }

  std::string name() const override { return "os-gauges"; }
  const ProbeCapabilities& capabilities() const override { return capabilities_; }

  RawCounterReading read_counter(const std::string& metric) override {
    throw ProbeError("os gauges: unknown counter metric: " + metric);
  }
  double read_power_watts(const std::string& metric) override {
    throw ProbeError("os gauges: unknown power metric: " + metric);
  }

  double read_gauge(const std::string& metric) override {
    refresh_if_stale();
    if (metric.rfind("CPU_USAGE_", 0) == 0) {
      const std::size_t k = index_of(metric, 10);
      if (k < usage_.size()) return usage_[k];
    } else if (metric.rfind("CPU_FREQUENCY_", 0) == 0) {
      const std::size_t k = index_of(metric, 14);
      if (static_cast<int>(k) < cores_) return read_frequency_mhz(static_cast<int>(k));
    } else if (metric == "USED_MEMORY") {
      return used_memory_bytes_;
    } else if (metric == "TOTAL_MEMORY") {
      return total_memory_bytes_;
    }
    throw ProbeError("os gauges: unknown gauge metric: " + metric);
  }

 private:
  static std::size_t index_of(const std::string& metric, std::size_t prefix_len) {
    return static_cast<std::size_t>(std::strtoul(metric.c_str() + prefix_len, nullptr, 10));
  }

  // 900 us staleness keeps one snapshot per tick at the smallest legal
  // sampling interval of 1 ms.
  void refresh_if_stale() {
    const std::uint64_t now = steady_now_ns();
    if (snapshot_ns_ != 0 && now - snapshot_ns_ < 900000) return;
    snapshot_ns_ = now;
    refresh_cpu_times();
    refresh_memory();
  }

  void refresh_cpu_times() {
    std::ifstream stat("/proc/stat");
    std::string line;
    while (std::getline(stat, line)) {
      if (line.rfind("cpu", 0) != 0 || line.size() < 4 || line[3] == ' ') continue;
      std::istringstream fields(line);
      std::string tag;
      fields >> tag;
      const auto k = static_cast<std::size_t>(std::strtoul(tag.c_str() + 3, nullptr, 10));
      if (static_cast<int>(k) >= cores_) continue;
      std::uint64_t user = 0, nice = 0, system = 0, idle = 0, iowait = 0, irq = 0,
                    softirq = 0, steal = 0;
      fields >> user >> nice >> system >> idle >> iowait >> irq >> softirq >> steal;
      CpuTimes next;
      next.busy = user + nice + system + irq + softirq + steal;
      next.total = next.busy + idle + iowait;
      const CpuTimes prev = prev_times_[k];
      if (prev.total == 0) {
        // First read: the since-boot ratio is the only defined usage value.
        usage_[k] = next.total > 0
                        ? 100.0 * static_cast<double>(next.busy) /
                              static_cast<double>(next.total)
                        : 0.0;
      } else if (next.total > prev.total) {
        usage_[k] = 100.0 * static_cast<double>(next.busy - prev.busy) /
                    static_cast<double>(next.total - prev.total);
      }
      prev_times_[k] = next;
    }
  }

  void refresh_memory() {
    std::ifstream meminfo("/proc/meminfo");
    std::string key;
    std::uint64_t value = 0;
    std::string unit;
    std::uint64_t total_kb = 0, available_kb = 0;
    while (meminfo >> key >> value >> unit) {
      if (key == "MemTotal:") total_kb = value;
      if (key == "MemAvailable:") available_kb = value;
    }
    total_memory_bytes_ = static_cast<double>(total_kb) * 1024.0;
    used_memory_bytes_ = static_cast<double>(total_kb - available_kb) * 1024.0;
  }

  double read_frequency_mhz(int k) {
    const std::string path = "/sys/devices/system/cpu/cpu" + std::to_string(k) +
                             "/cpufreq/scaling_cur_freq";
    std::ifstream file(path);
    std::uint64_t khz = 0;
    if (!(file >> khz)) {
      throw ProbeError("os gauges: cannot read " + path);
    }
    return static_cast<double>(khz) / 1000.0;
  }

  int cores_;
  ProbeCapabilities capabilities_;
  std::vector<CpuTimes> prev_times_;
  std::vector<double> usage_;
  double used_memory_bytes_ = 0.0;
  double total_memory_bytes_ = 0.0;
  std::uint64_t snapshot_ns_ = 0;
};

}  // namespace

std::unique_ptr<Probe> make_sysinfo_probe(std::vector<std::string>& warnings) {
  const int cores = logical_core_count();
  const bool with_frequency =
      std::filesystem::exists("/sys/devices/system/cpu/cpu0/cpufreq/scaling_cur_freq");
  if (!with_frequency) {
    warnings.push_back("os gauges: cpufreq interface absent, frequency columns omitted");
  }
  return std::make_unique<SysinfoProbe>(cores, with_frequency);
}

}  // namespace jouletrace::internal
