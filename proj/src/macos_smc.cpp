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

#if defined(__APPLE__)

#include <IOKit/IOKitLib.h>

#include <cstring>

namespace jouletrace::internal {

namespace {

// Wire structures of the system management controller's user client,
// selector 2 (read key). Layout is fixed by the kernel driver.
struct SmcVersion {
  char major;
  char minor;
  char build;
  char reserved;
  unsigned short release;
};

struct SmcLimits {
  unsigned short version;
  unsigned short length;
  unsigned int cpu_plimit;
  unsigned int gpu_plimit;
  unsigned int mem_plimit;
};

struct SmcKeyInfo {
  unsigned int data_size;
  unsigned int data_type;
  char data_attributes;
};

struct SmcKeyData {
  unsigned int key;
  SmcVersion version;
  SmcLimits limits;
  SmcKeyInfo key_info;
  char result;
  char status;
  char data8;
  unsigned int data32;
  unsigned char bytes[32];
};

constexpr unsigned int kSmcReadBytes = 5;
constexpr unsigned int kSmcReadKeyInfo = 9;
constexpr int kSmcUserClientOpen = 0;
constexpr int kSmcHandleYpcEvent = 2;

unsigned int four_cc(const char* code) {
  return (static_cast<unsigned int>(code[0]) << 24) |
         (static_cast<unsigned int>(code[1]) << 16) |
         (static_cast<unsigned int>(code[2]) << 8) | static_cast<unsigned int>(code[3]);
}

class SmcConnection {
 public:
  bool open() {
    const io_service_t service = IOServiceGetMatchingService(
        kIOMasterPortDefault, IOServiceMatching("AppleSMC"));
    if (!service) return false;
    const kern_return_t kr =
        IOServiceOpen(service, mach_task_self(), kSmcUserClientOpen, &connection_);
    IOObjectRelease(service);
    return kr == KERN_SUCCESS;
  }
  void close() {
    if (connection_) IOServiceClose(connection_);
    connection_ = 0;
  }

  bool call(const SmcKeyData& in, SmcKeyData& out) const {
    size_t out_size = sizeof(SmcKeyData);
    return IOConnectCallStructMethod(connection_, kSmcHandleYpcEvent, &in,
                                     sizeof(SmcKeyData), &out, &out_size) == KERN_SUCCESS;
  }

  // Reads a key as a double, decoding the common numeric SMC formats.
  bool read_key(const char* code, double& value) const {
    SmcKeyData in{};
    SmcKeyData out{};
    in.key = four_cc(code);
    in.data8 = kSmcReadKeyInfo;
    if (!call(in, out) || out.result != 0) return false;
    const unsigned int size = out.key_info.data_size;
    const unsigned int type = out.key_info.data_type;

    in.key_info.data_size = size;
    in.data8 = kSmcReadBytes;
    if (!call(in, out) || out.result != 0) return false;

    if (type == four_cc("flt ") && size == 4) {
      float f = 0;
      std::memcpy(&f, out.bytes, 4);
      value = f;
      return true;
    }
    if (type == four_cc("sp78") && size == 2) {
      const int raw = (out.bytes[0] << 8) | out.bytes[1];
      value = static_cast<double>(static_cast<short>(raw)) / 256.0;
      return true;
    }
    if ((type == four_cc("ui8 ") && size == 1)) {
      value = out.bytes[0];
      return true;
    }
    if (type == four_cc("ui16") && size == 2) {
      value = (out.bytes[0] << 8) | out.bytes[1];
      return true;
    }
    if (type == four_cc("ui32") && size == 4) {
      value = (static_cast<unsigned int>(out.bytes[0]) << 24) |
              (static_cast<unsigned int>(out.bytes[1]) << 16) |
              (static_cast<unsigned int>(out.bytes[2]) << 8) | out.bytes[3];
      return true;
    }
    return false;
  }

 private:
  io_connect_t connection_ = 0;
};

constexpr char kSystemPowerKey[] = "PSTR";   // total system power, watts
constexpr char kPackagePowerKey[] = "PCPC";  // processor package power, watts

class SmcProbe final : public Probe {
 public:
  SmcProbe(SmcConnection connection, bool has_package, bool has_system)
      : connection_(connection) {
    capabilities_.platform = Platform::macos;
    capabilities_.cpu_vendor = detect_host_cpu_vendor();
    capabilities_.origin = ProbeOrigin::hardware;
    if (has_package) {
      capabilities_.metrics.push_back({"PACKAGE_POWER", Unit::watts,
                                       MetricKind::instantaneous_power,
                                       MetricDomain::package()});
    }
    if (has_system) {
      capabilities_.metrics.push_back({"SYSTEM_POWER", Unit::watts,
                                       MetricKind::instantaneous_power,
                                       MetricDomain::system()});
    }
  }
  ~SmcProbe() override { connection_.close(); }

  std::string name() const override { return "smc"; }
  const ProbeCapabilities& capabilities() const override { return capabilities_; }

  RawCounterReading read_counter(const std::string& metric) override {
    throw ProbeError("smc probe: unknown counter metric: " + metric);
  }

  double read_power_watts(const std::string& metric) override {
    const char* key = nullptr;
    if (metric == "SYSTEM_POWER") key = kSystemPowerKey;
    if (metric == "PACKAGE_POWER") key = kPackagePowerKey;
    if (!key) throw ProbeError("smc probe: unknown power metric: " + metric);
    double value = 0;
    if (!connection_.read_key(key, value)) {
      throw ProbeError("smc probe: key read failed for " + metric);
    }
    return value;
  }

  double read_gauge(const std::string& metric) override {
    throw ProbeError("smc probe: unknown gauge metric: " + metric);
  }

 private:
  SmcConnection connection_;
  ProbeCapabilities capabilities_;
};

}  // namespace

std::unique_ptr<Probe> make_smc_probe(std::vector<std::string>& warnings) {
  SmcConnection connection;
  if (!connection.open()) {
    warnings.push_back("smc: cannot open the management controller service");
    return nullptr;
  }
  double ignored = 0;
  const bool has_package = connection.read_key(kPackagePowerKey, ignored);
  const bool has_system = connection.read_key(kSystemPowerKey, ignored);
  if (!has_package && !has_system) {
    connection.close();
    warnings.push_back("smc: no readable power keys on this model");
    return nullptr;
  }
  return std::make_unique<SmcProbe>(connection, has_package, has_system);
}

}  // namespace jouletrace::internal

#endif  // __APPLE__
