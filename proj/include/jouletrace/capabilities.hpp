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
#include <vector>

#include "jouletrace/metrics.hpp"

namespace jouletrace {

enum class Platform { linux_os, windows, macos };
enum class CpuVendor { intel, amd, apple_arm, other };
enum class GpuVendor { nvidia, amd, intel, apple, other };
enum class ProbeOrigin { hardware, simulated };

/// The set of metrics one probe can deliver on the current host.
struct ProbeCapabilities {
  std::vector<MetricDescriptor> metrics;  // deterministic order, unique names
  Platform platform = Platform::linux_os;
  CpuVendor cpu_vendor = CpuVendor::other;
  std::vector<GpuVendor> gpu_vendors;
  ProbeOrigin origin = ProbeOrigin::hardware;
};

/// Rows of the per-platform support matrix. A probe may only advertise
/// metrics whose property is marked supported for the host column.
enum class SensorProperty {
  cpu_usage,
  package_power,
  system_power,
  core_frequency,
  core_power,
  memory_usage,
  gpu_usage,
  gpu_frequency,
  gpu_power,
};

/// Maps a metric onto its support-matrix row. Metrics outside the matrix
/// (e.g. temperature gauges) return nullopt and are exempt from the check.
std::optional<SensorProperty> classify_metric(const MetricDescriptor& m);

bool cpu_property_supported(Platform p, CpuVendor v, SensorProperty prop);
bool gpu_property_supported(Platform p, GpuVendor v, SensorProperty prop);

/// Returns one message per metric that the support matrix forbids on this
/// (platform, vendor) column. Simulated capabilities always conform.
std::vector<std::string> conformance_violations(const ProbeCapabilities& caps);

Platform host_platform();
CpuVendor detect_host_cpu_vendor();
int logical_core_count();

std::string_view platform_name(Platform p);
std::string_view cpu_vendor_name(CpuVendor v);
std::string_view gpu_vendor_name(GpuVendor v);
std::optional<Platform> platform_from_name(std::string_view s);
std::optional<CpuVendor> cpu_vendor_from_name(std::string_view s);

}  // namespace jouletrace
