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
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <utility>

#include "probes_internal.hpp"

namespace jouletrace::internal {

namespace {

// Model-specific registers for the running-average-power-limit counters.
constexpr std::uint32_t kIntelPowerUnit = 0x606;
constexpr std::uint32_t kIntelPkgEnergy = 0x611;
constexpr std::uint32_t kAmdPowerUnit = 0xC0010299;
constexpr std::uint32_t kAmdCoreEnergy = 0xC001029A;
constexpr std::uint32_t kAmdPkgEnergy = 0xC001029B;

std::uint64_t steady_now_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

class MsrDevice {
 public:
  explicit MsrDevice(int cpu) : cpu_(cpu) {
    const std::string path = "/dev/cpu/" + std::to_string(cpu) + "/msr";
    fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  }
  MsrDevice(MsrDevice&& other) noexcept : cpu_(other.cpu_), fd_(other.fd_) {
    other.fd_ = -1;
  }
  MsrDevice& operator=(MsrDevice&&) = delete;
  MsrDevice(const MsrDevice&) = delete;
  ~MsrDevice() {
    if (fd_ >= 0) ::close(fd_);
  }

  bool ok() const { return fd_ >= 0; }
  int cpu() const { return cpu_; }

  std::uint64_t read(std::uint32_t reg) const {
    std::uint64_t value = 0;
    const ssize_t n = ::pread(fd_, &value, sizeof(value), reg);
    if (n != static_cast<ssize_t>(sizeof(value))) {
      throw ProbeError("msr read of register " + std::to_string(reg) + " on cpu " +
                       std::to_string(cpu_) + " failed: " + std::strerror(errno));
    }
    return value;
  }

 private:
  int cpu_;
  int fd_ = -1;
};

// First logical cpu of each physical core, so shared per-core counters are
// read once.
std::vector<int> physical_core_leaders() {
  std::vector<int> leaders;
  std::vector<std::pair<int, int>> seen;  // (package_id, core_id)
  for (int cpu = 0;; ++cpu) {
    const std::string base = "/sys/devices/system/cpu/cpu" + std::to_string(cpu);
    if (!std::filesystem::exists(base)) break;
    std::ifstream core_file(base + "/topology/core_id");
    std::ifstream pkg_file(base + "/topology/physical_package_id");
    int core_id = -1;
    int pkg_id = 0;
    if (!(core_file >> core_id)) core_id = cpu;
    if (!(pkg_file >> pkg_id)) pkg_id = 0;
    const auto key = std::make_pair(pkg_id, core_id);
    bool duplicate = false;
    for (const auto& k : seen) {
      if (k == key) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      seen.push_back(key);
      leaders.push_back(cpu);
    }
  }
  if (leaders.empty()) leaders.push_back(0);
  return leaders;
}

class MsrProbe final : public Probe {
 public:
  MsrProbe(CpuVendor vendor, MsrDevice package_device, std::vector<MsrDevice> core_devices)
      : vendor_(vendor),
        package_device_(std::move(package_device)),
        core_devices_(std::move(core_devices)) {
    const std::uint32_t unit_reg = vendor_ == CpuVendor::amd ? kAmdPowerUnit : kIntelPowerUnit;
    const std::uint64_t unit_msr = package_device_.read(unit_reg);
    // Real silicon always reports nonzero unit fields; an all-zero register
    // is a stubbed device that would yield a permanently zero counter.
    if (unit_msr == 0) {
      throw ProbeError("power unit register reads zero, device delivers no data");
    }
    // Bits 12:8 hold the energy-status-unit exponent.
    unit_joules_ = rapl_energy_unit_joules(static_cast<unsigned>((unit_msr >> 8) & 0x1F));

    capabilities_.platform = Platform::linux_os;
    capabilities_.cpu_vendor = vendor_;
    capabilities_.origin = ProbeOrigin::hardware;
    capabilities_.metrics.push_back(
        {"PACKAGE_ENERGY", Unit::joules, MetricKind::cumulative_energy,
         MetricDomain::package()});
    for (std::size_t i = 0; i < core_devices_.size(); ++i) {
      capabilities_.metrics.push_back(
          {"CORE" + std::to_string(i) + "_ENERGY", Unit::joules,
           MetricKind::cumulative_energy, MetricDomain::core(static_cast<int>(i))});
    }
  }

  std::string name() const override { return "rapl-msr"; }
  const ProbeCapabilities& capabilities() const override { return capabilities_; }

  RawCounterReading read_counter(const std::string& metric) override {
    RawCounterReading reading;
    reading.width_bits = 32;
    reading.unit_joules = unit_joules_;
    reading.timestamp_ns = steady_now_ns();
    if (metric == "PACKAGE_ENERGY") {
      const std::uint32_t reg =
          vendor_ == CpuVendor::amd ? kAmdPkgEnergy : kIntelPkgEnergy;
      reading.raw = package_device_.read(reg) & 0xFFFFFFFFull;
      return reading;
    }
    if (metric.rfind("CORE", 0) == 0) {
      const std::size_t index = std::strtoul(metric.c_str() + 4, nullptr, 10);
      if (index < core_devices_.size()) {
        reading.raw = core_devices_[index].read(kAmdCoreEnergy) & 0xFFFFFFFFull;
        return reading;
      }
    }
    throw ProbeError("msr probe: unknown counter metric: " + metric);
  }

  double read_power_watts(const std::string& metric) override {
    throw ProbeError("msr probe: unknown power metric: " + metric);
  }
  double read_gauge(const std::string& metric) override {
    throw ProbeError("msr probe: unknown gauge metric: " + metric);
  }

 private:
  CpuVendor vendor_;
  MsrDevice package_device_;
  std::vector<MsrDevice> core_devices_;
  double unit_joules_ = 0.0;
  ProbeCapabilities capabilities_;
};

}  // namespace

std::unique_ptr<Probe> make_msr_probe(std::vector<std::string>& warnings) {
  const CpuVendor vendor = detect_host_cpu_vendor();
  if (vendor != CpuVendor::intel && vendor != CpuVendor::amd) return nullptr;

  MsrDevice package_device(0);
  if (!package_device.ok()) {
    if (errno == EACCES || errno == EPERM) {
      warnings.push_back("msr: /dev/cpu/0/msr exists but is not readable (run as root)");
    }
    return nullptr;
  }

  std::vector<MsrDevice> core_devices;
  if (vendor == CpuVendor::amd) {
    // Per-core energy counters exist only on this vendor.
    for (int cpu : physical_core_leaders()) {
      MsrDevice device(cpu);
      if (device.ok()) core_devices.push_back(std::move(device));
    }
  }

  try {
    return std::make_unique<MsrProbe>(vendor, std::move(package_device),
                                      std::move(core_devices));
  } catch (const ProbeError& e) {
    warnings.push_back(std::string("msr: ") + e.what());
    return nullptr;
  }
}

}  // namespace jouletrace::internal
