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

#include "jouletrace/capabilities.hpp"

#include <thread>

#if defined(__linux__)
#include <fstream>
#elif defined(_WIN32)
#include <intrin.h>
#include <cstring>
#endif

namespace jouletrace {

std::optional<SensorProperty> classify_metric(const MetricDescriptor& m) {
  using Tag = MetricDomain::Tag;
  const bool energy_like =
      m.kind == MetricKind::cumulative_energy || m.kind == MetricKind::instantaneous_power;
  switch (m.domain.tag) {
    case Tag::package:
      if (energy_like) return SensorProperty::package_power;
      break;
    case Tag::core:
      if (energy_like) return SensorProperty::core_power;
      if (m.unit == Unit::megahertz) return SensorProperty::core_frequency;
      if (m.unit == Unit::percent) return SensorProperty::cpu_usage;
      break;
    case Tag::system:
      if (energy_like) return SensorProperty::system_power;
      if (m.unit == Unit::percent) return SensorProperty::cpu_usage;
      break;
    case Tag::gpu:
      if (energy_like) return SensorProperty::gpu_power;
      if (m.unit == Unit::megahertz) return SensorProperty::gpu_frequency;
      if (m.unit == Unit::percent) return SensorProperty::gpu_usage;
      break;
    case Tag::memory:
      if (m.unit == Unit::bytes || m.unit == Unit::percent) return SensorProperty::memory_usage;
      break;
  }
  return std::nullopt;
}

namespace {

// Column index into the support rows: 0 = Intel, 1 = AMD, 2 = ARM/other.
int cpu_column(CpuVendor v) {
  switch (v) {
    case CpuVendor::intel: return 0;
    case CpuVendor::amd: return 1;
    case CpuVendor::apple_arm:
    case CpuVendor::other: return 2;
  }
  return 2;
}

}  // namespace

bool cpu_property_supported(Platform p, CpuVendor v, SensorProperty prop) {
  const int col = cpu_column(v);
  switch (prop) {
    case SensorProperty::cpu_usage:
    case SensorProperty::memory_usage:
      return true;
    case SensorProperty::package_power:
      // Supported everywhere except Apple silicon.
      return !(p == Platform::macos && col == 2);
    case SensorProperty::system_power:
      return p == Platform::macos;
    case SensorProperty::core_frequency:
      return p != Platform::macos;
    case SensorProperty::core_power:
      return p == Platform::linux_os && v == CpuVendor::amd;
    default:
      return false;
  }
}

bool gpu_property_supported(Platform p, GpuVendor v, SensorProperty prop) {
  const bool nvidia_on_desktop =
      v == GpuVendor::nvidia && (p == Platform::windows || p == Platform::linux_os);
  switch (prop) {
    case SensorProperty::gpu_usage:
    case SensorProperty::gpu_frequency:
      return nvidia_on_desktop;
    case SensorProperty::gpu_power:
      if (nvidia_on_desktop) return true;
      return p == Platform::macos &&
             (v == GpuVendor::amd || v == GpuVendor::intel || v == GpuVendor::apple);
    default:
      return false;
  }
}

std::vector<std::string> conformance_violations(const ProbeCapabilities& caps) {
  std::vector<std::string> violations;
  if (caps.origin == ProbeOrigin::simulated) return violations;
  for (const auto& m : caps.metrics) {
    const auto prop = classify_metric(m);
    if (!prop) continue;  // outside the support matrix, e.g. temperature
    bool ok = false;
    if (m.domain.tag == MetricDomain::Tag::gpu) {
      for (GpuVendor gv : caps.gpu_vendors) {
        if (gpu_property_supported(caps.platform, gv, *prop)) {
          ok = true;
          break;
        }
      }
    } else {
      ok = cpu_property_supported(caps.platform, caps.cpu_vendor, *prop);
    }
    if (!ok) {
      violations.push_back(m.name + " is not supported on " +
                           std::string(platform_name(caps.platform)) + "/" +
                           std::string(cpu_vendor_name(caps.cpu_vendor)));
    }
  }
  return violations;
}

Platform host_platform() {
#if defined(_WIN32)
  return Platform::windows;
#elif defined(__APPLE__)
  return Platform::macos;
#else
  return Platform::linux_os;
#endif
}

CpuVendor detect_host_cpu_vendor() {
#if defined(__APPLE__)
#if defined(__aarch64__) || defined(__arm64__)
  return CpuVendor::apple_arm;
#else
  return CpuVendor::intel;
#endif
#elif defined(__linux__)
  std::ifstream cpuinfo("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpuinfo, line)) {
    if (line.rfind("vendor_id", 0) == 0) {
      if (line.find("GenuineIntel") != std::string::npos) return CpuVendor::intel;
      if (line.find("AuthenticAMD") != std::string::npos) return CpuVendor::amd;
      return CpuVendor::other;
    }
  }
  return CpuVendor::other;
#elif defined(_WIN32)
  int regs[4] = {0};
  __cpuid(regs, 0);
  char vendor[13] = {0};
  std::memcpy(vendor + 0, &regs[1], 4);
  std::memcpy(vendor + 4, &regs[3], 4);
  std::memcpy(vendor + 8, &regs[2], 4);
  if (std::strcmp(vendor, "GenuineIntel") == 0) return CpuVendor::intel;
  if (std::strcmp(vendor, "AuthenticAMD") == 0) return CpuVendor::amd;
  return CpuVendor::other;
#else
  return CpuVendor::other;
#endif
}

int logical_core_count() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

std::string_view platform_name(Platform p) {
  switch (p) {
    case Platform::linux_os: return "linux";
    case Platform::windows: return "windows";
    case Platform::macos: return "macos";
  }
  return "unknown";
}

std::string_view cpu_vendor_name(CpuVendor v) {
  switch (v) {
    case CpuVendor::intel: return "intel";
    case CpuVendor::amd: return "amd";
    case CpuVendor::apple_arm: return "apple_arm";
    case CpuVendor::other: return "other";
  }
  return "unknown";
}

std::string_view gpu_vendor_name(GpuVendor v) {
  switch (v) {
    case GpuVendor::nvidia: return "nvidia";
    case GpuVendor::amd: return "amd";
    case GpuVendor::intel: return "intel";
    case GpuVendor::apple: return "apple";
    case GpuVendor::other: return "other";
  }
  return "unknown";
}

std::optional<Platform> platform_from_name(std::string_view s) {
  if (s == "linux") return Platform::linux_os;
  if (s == "windows") return Platform::windows;
  if (s == "macos") return Platform::macos;
  return std::nullopt;
}

std::optional<CpuVendor> cpu_vendor_from_name(std::string_view s) {
  if (s == "intel") return CpuVendor::intel;
  if (s == "amd") return CpuVendor::amd;
  if (s == "apple_arm") return CpuVendor::apple_arm;
  if (s == "other") return CpuVendor::other;
  return std::nullopt;
}

}  // namespace jouletrace
