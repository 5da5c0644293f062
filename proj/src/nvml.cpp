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

#include <cstdlib>
#include <string>

#include "probes_internal.hpp"

#if defined(_WIN32)
#include <windows.h>
#else
#include <dlfcn.h>
#endif

namespace jouletrace::internal {

namespace {

// The management library is loaded at run time: linking against a vendor
// SDK would make every build require that vendor's driver stack.
struct NvmlApi {
  using Handle = void*;
  struct Utilization {
    unsigned int gpu;
    unsigned int memory;
  };
  static constexpr int kClockGraphics = 0;

  int (*init)() = nullptr;
  int (*shutdown)() = nullptr;
  int (*device_count)(unsigned int*) = nullptr;
  int (*device_by_index)(unsigned int, Handle*) = nullptr;
  int (*power_usage)(Handle, unsigned int*) = nullptr;           // milliwatts
  int (*utilization)(Handle, Utilization*) = nullptr;            // percent
  int (*clock_info)(Handle, int, unsigned int*) = nullptr;       // MHz

#if defined(_WIN32)
  HMODULE library = nullptr;
  void* symbol(const char* name) {
    return reinterpret_cast<void*>(GetProcAddress(library, name));
  }
  bool open() {
    library = LoadLibraryA("nvml.dll");
    return library != nullptr;
  }
  void close() {
    if (library) FreeLibrary(library);
    library = nullptr;
  }
#else
  void* library = nullptr;
  void* symbol(const char* name) { return ::dlsym(library, name); }
  bool open() {
    library = ::dlopen("libnvidia-ml.so.1", RTLD_NOW);
    if (!library) library = ::dlopen("libnvidia-ml.so", RTLD_NOW);
    return library != nullptr;
  }
  void close() {
    if (library) ::dlclose(library);
    library = nullptr;
  }
#endif

  bool load() {
    if (!open()) return false;
    init = reinterpret_cast<int (*)()>(symbol("nvmlInit_v2"));
    shutdown = reinterpret_cast<int (*)()>(symbol("nvmlShutdown"));
    device_count =
        reinterpret_cast<int (*)(unsigned int*)>(symbol("nvmlDeviceGetCount_v2"));
    device_by_index = reinterpret_cast<int (*)(unsigned int, Handle*)>(
        symbol("nvmlDeviceGetHandleByIndex_v2"));
    power_usage = reinterpret_cast<int (*)(Handle, unsigned int*)>(
        symbol("nvmlDeviceGetPowerUsage"));
    utilization = reinterpret_cast<int (*)(Handle, Utilization*)>(
        symbol("nvmlDeviceGetUtilizationRates"));
    clock_info = reinterpret_cast<int (*)(Handle, int, unsigned int*)>(
        symbol("nvmlDeviceGetClockInfo"));
    if (init && shutdown && device_count && device_by_index && power_usage &&
        utilization && clock_info) {
      return true;
    }
    close();
    return false;
  }
};

class NvmlProbe final : public Probe {
 public:
  NvmlProbe(NvmlApi api, std::vector<NvmlApi::Handle> devices)
      : api_(api), devices_(std::move(devices)) {
    capabilities_.platform = host_platform();
    capabilities_.cpu_vendor = detect_host_cpu_vendor();
    capabilities_.gpu_vendors = {GpuVendor::nvidia};
    capabilities_.origin = ProbeOrigin::hardware;
    for (std::size_t i = 0; i < devices_.size(); ++i) {
      const std::string prefix = "GPU" + std::to_string(i);
      const auto domain = MetricDomain::gpu(static_cast<int>(i));
      capabilities_.metrics.push_back(
          {prefix + "_POWER", Unit::watts, MetricKind::instantaneous_power, domain});
      capabilities_.metrics.push_back(
          {prefix + "_USAGE", Unit::percent, MetricKind::gauge, domain});
      capabilities_.metrics.push_back(
          {prefix + "_FREQUENCY", Unit::megahertz, MetricKind::gauge, domain});
    }
  }
  ~NvmlProbe() override {
    api_.shutdown();
    api_.close();
  }

  std::string name() const override { return "nvml"; }
  const ProbeCapabilities& capabilities() const override { return capabilities_; }

  RawCounterReading read_counter(const std::string& metric) override {
    throw ProbeError("nvml probe: unknown counter metric: " + metric);
  }

  double read_power_watts(const std::string& metric) override {
    const auto [index, field] = parse(metric);
    if (field != "POWER") throw ProbeError("nvml probe: unknown power metric: " + metric);
    unsigned int milliwatts = 0;
    if (api_.power_usage(devices_[index], &milliwatts) != 0) {
      throw ProbeError("nvml probe: power read failed for " + metric);
    }
    return static_cast<double>(milliwatts) / 1000.0;
  }

  double read_gauge(const std::string& metric) override {
    const auto [index, field] = parse(metric);
    if (field == "USAGE") {
      NvmlApi::Utilization util{};
      if (api_.utilization(devices_[index], &util) != 0) {
        throw ProbeError("nvml probe: utilization read failed for " + metric);
      }
      return static_cast<double>(util.gpu);
    }
    if (field == "FREQUENCY") {
      unsigned int mhz = 0;
      if (api_.clock_info(devices_[index], NvmlApi::kClockGraphics, &mhz) != 0) {
        throw ProbeError("nvml probe: clock read failed for " + metric);
      }
      return static_cast<double>(mhz);
    }
    throw ProbeError("nvml probe: unknown gauge metric: " + metric);
  }

 private:
  std::pair<std::size_t, std::string> parse(const std::string& metric) const {
    if (metric.rfind("GPU", 0) == 0) {
      char* end = nullptr;
      const auto index = std::strtoul(metric.c_str() + 3, &end, 10);
      if (end && *end == '_' && index < devices_.size()) {
        return {static_cast<std::size_t>(index), std::string(end + 1)};
      }
    }
    throw ProbeError("nvml probe: unknown metric: " + metric);
  }

  NvmlApi api_;
  std::vector<NvmlApi::Handle> devices_;
  ProbeCapabilities capabilities_;
};

}  // namespace

std::unique_ptr<Probe> make_nvml_probe(std::vector<std::string>& warnings) {
  NvmlApi api;
  if (!api.load()) return nullptr;  // no driver installed: not worth a warning
  if (api.init() != 0) {
    api.close();
    warnings.push_back("nvml: library found but initialization failed");
    return nullptr;
  }
  unsigned int count = 0;
  if (api.device_count(&count) != 0 || count == 0) {
    api.shutdown();
    api.close();
    return nullptr;
  }
  std::vector<NvmlApi::Handle> devices;
  for (unsigned int i = 0; i < count; ++i) {
    NvmlApi::Handle handle = nullptr;
    if (api.device_by_index(i, &handle) == 0 && handle) devices.push_back(handle);
  }
  if (devices.empty()) {
    api.shutdown();
    api.close();
    return nullptr;
  }
  (void)warnings;
  return std::make_unique<NvmlProbe>(api, std::move(devices));
}

}  // namespace jouletrace::internal
