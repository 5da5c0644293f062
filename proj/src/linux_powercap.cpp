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

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "probes_internal.hpp"

namespace jouletrace::internal {

namespace {

constexpr char kPowercapRoot[] = "/sys/class/powercap";

std::uint64_t steady_now_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

struct PowercapZone {
  std::string metric_name;
  int fd = -1;
};

class PowercapProbe final : public Probe {
 public:
  explicit PowercapProbe(std::vector<PowercapZone> zones) : zones_(std::move(zones)) {
    capabilities_.platform = Platform::linux_os;
    capabilities_.cpu_vendor = detect_host_cpu_vendor();
    capabilities_.origin = ProbeOrigin::hardware;
    for (const auto& zone : zones_) {
      capabilities_.metrics.push_back({zone.metric_name, Unit::joules,
                                       MetricKind::cumulative_energy,
                                       MetricDomain::package()});
    }
  }
  ~PowercapProbe() override {
    for (auto& zone : zones_) {
      if (zone.fd >= 0) ::close(zone.fd);
    }
  }

  std::string name() const override { return "rapl-powercap"; }
  const ProbeCapabilities& capabilities() const override { return capabilities_; }

  RawCounterReading read_counter(const std::string& metric) override {
    for (const auto& zone : zones_) {
      if (zone.metric_name != metric) continue;
      char buffer[32];
      const ssize_t n = ::pread(zone.fd, buffer, sizeof(buffer) - 1, 0);
      if (n <= 0) {
        throw ProbeError("powercap read of " + metric + " failed: " + std::strerror(errno));
      }
      buffer[n] = '\0';
      std::uint64_t microjoules = 0;
      const auto [ptr, ec] = std::from_chars(buffer, buffer + n, microjoules);
      if (ec != std::errc{} || ptr == buffer) {
        throw ProbeError("powercap read of " + metric + ": unparsable value");
      }
      RawCounterReading reading;
      // The interface reports microjoules in a wide register; the value
      // range file is ignored and the register treated as 64-bit, which
      // keeps deltas exact for sessions far shorter than a wrap period.
      reading.raw = microjoules;
      reading.width_bits = 64;
      reading.unit_joules = 1e-6;
      reading.timestamp_ns = steady_now_ns();
      return reading;
    }
    throw ProbeError("powercap probe: unknown counter metric: " + metric);
  }

  double read_power_watts(const std::string& metric) override {
    throw ProbeError("powercap probe: unknown power metric: " + metric);
  }
  double read_gauge(const std::string& metric) override {
    throw ProbeError("powercap probe: unknown gauge metric: " + metric);
  }

 private:
  std::vector<PowercapZone> zones_;
  ProbeCapabilities capabilities_;
};

}  // namespace

std::unique_ptr<Probe> make_powercap_probe(std::vector<std::string>& warnings) {
  if (!std::filesystem::exists(kPowercapRoot)) return nullptr;

  std::vector<PowercapZone> zones;
  bool denied = false;
  // Top-level zones only: children cover sub-domains (core, uncore, dram),
  // and a platform-wide zone advertising system power would contradict what
  // this sensor family supports on this platform.
  for (int index = 0;; ++index) {
    const std::string base =
        std::string(kPowercapRoot) + "/intel-rapl:" + std::to_string(index);
    if (!std::filesystem::exists(base)) break;
    std::ifstream name_file(base + "/name");
    std::string zone_name;
    name_file >> zone_name;
    if (zone_name.rfind("package", 0) != 0) continue;

    const std::string energy_path = base + "/energy_uj";
    const int fd = ::open(energy_path.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd < 0) {
      denied = denied || errno == EACCES || errno == EPERM;
      continue;
    }
    PowercapZone zone;
    zone.metric_name =
        index == 0 ? "PACKAGE_ENERGY" : "PACKAGE_ENERGY_" + std::to_string(index);
    zone.fd = fd;
    zones.push_back(std::move(zone));
  }
  if (zones.empty()) {
    if (denied) {
      warnings.push_back(
          "powercap: energy counters exist but are not readable (run as root)");
    }
    return nullptr;
  }
  return std::make_unique<PowercapProbe>(std::move(zones));
}

}  // namespace jouletrace::internal
