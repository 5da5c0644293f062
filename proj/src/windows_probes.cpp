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

#include "probes_internal.hpp"

#if defined(_WIN32)

#include <windows.h>
// powerbase.h needs the windows.h types above.
#include <powerbase.h>

#include <cstdlib>
#include <vector>

#pragma comment(lib, "PowrProf.lib")

namespace jouletrace::internal {

namespace {

struct ProcessorPowerInformation {
  ULONG Number;
  ULONG MaxMhz;
  ULONG CurrentMhz;
  ULONG MhzLimit;
  ULONG MaxIdleState;
  ULONG CurrentIdleState;
};

typedef LONG(WINAPI* NtQuerySystemInformationFn)(ULONG, PVOID, ULONG, PULONG);
constexpr ULONG kSystemProcessorPerformanceInformation = 8;

struct SystemProcessorPerformanceInformation {
  LARGE_INTEGER IdleTime;
  LARGE_INTEGER KernelTime;  // includes idle time
  LARGE_INTEGER UserTime;
  LARGE_INTEGER DpcTime;
  LARGE_INTEGER InterruptTime;
  ULONG InterruptCount;
};

// CPU usage, frequency, and memory via documented system services. Package
// energy needs a signed kernel driver for the model-specific registers and
// is deliberately not advertised here.
class WindowsCpuProbe final : public Probe {
 public:
  explicit WindowsCpuProbe(int cores) : cores_(cores) {
    ntdll_ = GetModuleHandleA("ntdll.dll");
    query_ = ntdll_ ? reinterpret_cast<NtQuerySystemInformationFn>(
                          GetProcAddress(ntdll_, "NtQuerySystemInformation"))
                    : nullptr;
    capabilities_.platform = Platform::windows;
    capabilities_.cpu_vendor = detect_host_cpu_vendor();
    capabilities_.origin = ProbeOrigin::hardware;
    if (query_) {
      for (int k = 0; k < cores_; ++k) {
        capabilities_.metrics.push_back({"CPU_USAGE_" + std::to_string(k), Unit::percent,
                                         MetricKind::gauge, MetricDomain::core(k)});
      }
    }
    for (int k = 0; k < cores_; ++k) {
      capabilities_.metrics.push_back({"CPU_FREQUENCY_" + std::to_string(k),
                                       Unit::megahertz, MetricKind::gauge,
                                       MetricDomain::core(k)});
    }
    capabilities_.metrics.push_back(
        {"USED_MEMORY", Unit::bytes, MetricKind::gauge, MetricDomain::memory()});
    capabilities_.metrics.push_back(
        {"TOTAL_MEMORY", Unit::bytes, MetricKind::gauge, MetricDomain::memory()});
    prev_busy_.assign(cores_, 0);
    prev_total_.assign(cores_, 0);
    usage_.assign(cores_, 0.0);
  }

  std::string name() const override { return "windows-gauges"; }
  const ProbeCapabilities& capabilities() const override { return capabilities_; }

  RawCounterReading read_counter(const std::string& metric) override {
    throw ProbeError("windows gauges: unknown counter metric: " + metric);
  }
  double read_power_watts(const std::string& metric) override {
    throw ProbeError("windows gauges: unknown power metric: " + metric);
  }

  double read_gauge(const std::string& metric) override {
    refresh_if_stale();
    if (metric.rfind("CPU_USAGE_", 0) == 0) {
      const auto k = std::strtoul(metric.c_str() + 10, nullptr, 10);
      if (k < usage_.size()) return usage_[k];
    } else if (metric.rfind("CPU_FREQUENCY_", 0) == 0) {
      const auto k = std::strtoul(metric.c_str() + 14, nullptr, 10);
      if (k < frequency_.size()) return frequency_[k];
    } else if (metric == "USED_MEMORY") {
      return used_memory_bytes_;
    } else if (metric == "TOTAL_MEMORY") {
      return total_memory_bytes_;
    }
    throw ProbeError("windows gauges: unknown gauge metric: " + metric);
  }

 private:
  void refresh_if_stale() {
    const ULONGLONG now = GetTickCount64();
    if (snapshot_ms_ != 0 && now - snapshot_ms_ < 1) return;
    snapshot_ms_ = now;
    refresh_usage();
    refresh_frequency();
    refresh_memory();
  }

  void refresh_usage() {
    if (!query_) return;
    std::vector<SystemProcessorPerformanceInformation> info(cores_);
    ULONG returned = 0;
    const ULONG bytes = static_cast<ULONG>(info.size() * sizeof(info[0]));
    if (query_(kSystemProcessorPerformanceInformation, info.data(), bytes, &returned) != 0) {
      return;
    }
    for (int k = 0; k < cores_; ++k) {
      const ULONGLONG idle = static_cast<ULONGLONG>(info[k].IdleTime.QuadPart);
      const ULONGLONG total = static_cast<ULONGLONG>(info[k].KernelTime.QuadPart) +
                              static_cast<ULONGLONG>(info[k].UserTime.QuadPart);
      const ULONGLONG busy = total - idle;
      if (prev_total_[k] != 0 && total > prev_total_[k]) {
        usage_[k] = 100.0 * static_cast<double>(busy - prev_busy_[k]) /
                    static_cast<double>(total - prev_total_[k]);
      } else if (total > 0) {
        usage_[k] = 100.0 * static_cast<double>(busy) / static_cast<double>(total);
      }
      prev_busy_[k] = busy;
      prev_total_[k] = total;
    }
  }

  void refresh_frequency() {
    std::vector<ProcessorPowerInformation> info(cores_);
    const ULONG bytes = static_cast<ULONG>(info.size() * sizeof(info[0]));
    frequency_.assign(cores_, 0.0);
    if (CallNtPowerInformation(ProcessorInformation, nullptr, 0, info.data(), bytes) == 0) {
      for (int k = 0; k < cores_; ++k) {
        frequency_[k] = static_cast<double>(info[k].CurrentMhz);
      }
    }
  }

  void refresh_memory() {
    MEMORYSTATUSEX status{};
    status.dwLength = sizeof(status);
    if (GlobalMemoryStatusEx(&status)) {
      total_memory_bytes_ = static_cast<double>(status.ullTotalPhys);
      used_memory_bytes_ =
          static_cast<double>(status.ullTotalPhys - status.ullAvailPhys);
    }
  }

  int cores_;
  HMODULE ntdll_ = nullptr;
  NtQuerySystemInformationFn query_ = nullptr;
  ProbeCapabilities capabilities_;
  std::vector<ULONGLONG> prev_busy_;
  std::vector<ULONGLONG> prev_total_;
  std::vector<double> usage_;
  std::vector<double> frequency_;
  double used_memory_bytes_ = 0.0;
  double total_memory_bytes_ = 0.0;
  ULONGLONG snapshot_ms_ = 0;
};

}  // namespace

std::unique_ptr<Probe> make_windows_cpu_probe(std::vector<std::string>& warnings) {
  warnings.push_back(
      "windows: package energy needs a kernel driver for the model-specific "
      "registers; traces will carry usage gauges only");
  return std::make_unique<WindowsCpuProbe>(logical_core_count());
}

}  // namespace jouletrace::internal

#endif  // _WIN32
