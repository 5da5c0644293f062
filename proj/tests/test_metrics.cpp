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
#include "jouletrace/metrics.hpp"

#include <doctest.h>

namespace jouletrace {
namespace {

MetricDescriptor make(const std::string& name, Unit unit, MetricKind kind,
                      MetricDomain domain) {
  return MetricDescriptor{name, unit, kind, domain};
}

TEST_CASE("metric names are upper snake case") {
  CHECK(is_valid_metric_name("PACKAGE_ENERGY"));
  CHECK(is_valid_metric_name("CPU_USAGE_0"));
  CHECK(is_valid_metric_name("GPU0_POWER"));
  CHECK_FALSE(is_valid_metric_name(""));
  CHECK_FALSE(is_valid_metric_name("package_energy"));
  CHECK_FALSE(is_valid_metric_name("CPU USAGE"));
  CHECK_FALSE(is_valid_metric_name("ENERGY(J)"));
}

TEST_CASE("kind pins the unit for energy and power") {
  CHECK(is_well_formed(make("PACKAGE_ENERGY", Unit::joules,
                            MetricKind::cumulative_energy, MetricDomain::package())));
  CHECK_FALSE(is_well_formed(make("PACKAGE_ENERGY", Unit::watts,
                                  MetricKind::cumulative_energy,
                                  MetricDomain::package())));
  CHECK(is_well_formed(make("SYSTEM_POWER", Unit::watts,
                            MetricKind::instantaneous_power, MetricDomain::system())));
  CHECK_FALSE(is_well_formed(make("SYSTEM_POWER", Unit::joules,
                                  MetricKind::instantaneous_power,
                                  MetricDomain::system())));
  CHECK(is_well_formed(make("CPU_FREQUENCY_2", Unit::megahertz, MetricKind::gauge,
                            MetricDomain::core(2))));
  CHECK_FALSE(is_well_formed(make("bad name", Unit::percent, MetricKind::gauge,
                                  MetricDomain::system())));
}

TEST_CASE("column names carry a unit suffix for energy and power only") {
  CHECK(column_name(make("PACKAGE_ENERGY", Unit::joules, MetricKind::cumulative_energy,
                         MetricDomain::package())) == "PACKAGE_ENERGY (J)");
  CHECK(column_name(make("SYSTEM_POWER", Unit::watts, MetricKind::instantaneous_power,
                         MetricDomain::system())) == "SYSTEM_POWER (W)");
  CHECK(column_name(make("CPU_USAGE_0", Unit::percent, MetricKind::gauge,
                         MetricDomain::core(0))) == "CPU_USAGE_0");

  CHECK(metric_name_from_column("PACKAGE_ENERGY (J)") == "PACKAGE_ENERGY");
  CHECK(metric_name_from_column("SYSTEM_POWER (W)") == "SYSTEM_POWER");
  CHECK(metric_name_from_column("CPU_USAGE_0") == "CPU_USAGE_0");
}

TEST_CASE("domain names round trip") {
  for (const MetricDomain& d :
       {MetricDomain::package(), MetricDomain::core(3), MetricDomain::system(),
        MetricDomain::gpu(0), MetricDomain::memory()}) {
    auto back = domain_from_name(domain_name(d));
    REQUIRE(back.has_value());
    CHECK(*back == d);
  }
  CHECK(domain_name(MetricDomain::core(3)) == "core:3");
  CHECK_FALSE(domain_from_name("core:").has_value());
  CHECK_FALSE(domain_from_name("volcano").has_value());
}

TEST_CASE("unit and kind names round trip") {
  for (Unit u : {Unit::joules, Unit::watts, Unit::megahertz, Unit::percent,
                 Unit::bytes, Unit::celsius}) {
    auto back = unit_from_name(unit_name(u));
    REQUIRE(back.has_value());
    CHECK(*back == u);
  }
  for (MetricKind k : {MetricKind::cumulative_energy, MetricKind::instantaneous_power,
                       MetricKind::gauge}) {
    auto back = kind_from_name(kind_name(k));
    REQUIRE(back.has_value());
    CHECK(*back == k);
  }
  CHECK_FALSE(unit_from_name("furlongs").has_value());
  CHECK_FALSE(kind_from_name("sporadic").has_value());
}

TEST_CASE("metrics map onto support matrix rows") {
  auto prop = [](MetricDescriptor m) { return classify_metric(m); };
  CHECK(prop(make("PACKAGE_ENERGY", Unit::joules, MetricKind::cumulative_energy,
                  MetricDomain::package())) == SensorProperty::package_power);
  CHECK(prop(make("CORE0_ENERGY", Unit::joules, MetricKind::cumulative_energy,
                  MetricDomain::core(0))) == SensorProperty::core_power);
  CHECK(prop(make("SYSTEM_POWER", Unit::watts, MetricKind::instantaneous_power,
                  MetricDomain::system())) == SensorProperty::system_power);
  CHECK(prop(make("CPU_USAGE_1", Unit::percent, MetricKind::gauge,
                  MetricDomain::core(1))) == SensorProperty::cpu_usage);
  CHECK(prop(make("CPU_FREQUENCY_1", Unit::megahertz, MetricKind::gauge,
                  MetricDomain::core(1))) == SensorProperty::core_frequency);
  CHECK(prop(make("GPU0_POWER", Unit::watts, MetricKind::instantaneous_power,
                  MetricDomain::gpu(0))) == SensorProperty::gpu_power);
  CHECK(prop(make("GPU0_USAGE", Unit::percent, MetricKind::gauge,
                  MetricDomain::gpu(0))) == SensorProperty::gpu_usage);
  CHECK(prop(make("GPU0_FREQUENCY", Unit::megahertz, MetricKind::gauge,
                  MetricDomain::gpu(0))) == SensorProperty::gpu_frequency);
  CHECK(prop(make("MEMORY_USED", Unit::bytes, MetricKind::gauge,
                  MetricDomain::memory())) == SensorProperty::memory_usage);
  CHECK_FALSE(prop(make("PACKAGE_TEMPERATURE", Unit::celsius, MetricKind::gauge,
                        MetricDomain::package()))
                  .has_value());
}

TEST_CASE("cpu support matrix spot checks") {
  using P = Platform;
  using V = CpuVendor;
  using S = SensorProperty;

  for (P p : {P::linux_os, P::windows, P::macos}) {
    for (V v : {V::intel, V::amd, V::apple_arm}) {
      CHECK(cpu_property_supported(p, v, S::cpu_usage));
      CHECK(cpu_property_supported(p, v, S::memory_usage));
    }
  }

  CHECK(cpu_property_supported(P::linux_os, V::intel, S::package_power));
  CHECK(cpu_property_supported(P::windows, V::amd, S::package_power));
  CHECK(cpu_property_supported(P::macos, V::intel, S::package_power));
  CHECK_FALSE(cpu_property_supported(P::macos, V::apple_arm, S::package_power));

  CHECK(cpu_property_supported(P::macos, V::intel, S::system_power));
  CHECK(cpu_property_supported(P::macos, V::apple_arm, S::system_power));
  CHECK_FALSE(cpu_property_supported(P::linux_os, V::intel, S::system_power));
  CHECK_FALSE(cpu_property_supported(P::windows, V::amd, S::system_power));

  CHECK(cpu_property_supported(P::linux_os, V::intel, S::core_frequency));
  CHECK(cpu_property_supported(P::windows, V::amd, S::core_frequency));
  CHECK_FALSE(cpu_property_supported(P::macos, V::intel, S::core_frequency));

  CHECK(cpu_property_supported(P::linux_os, V::amd, S::core_power));
  CHECK_FALSE(cpu_property_supported(P::linux_os, V::intel, S::core_power));
  CHECK_FALSE(cpu_property_supported(P::windows, V::amd, S::core_power));
}

TEST_CASE("gpu support matrix spot checks") {
  using P = Platform;
  using G = GpuVendor;
  using S = SensorProperty;

  for (P p : {P::linux_os, P::windows}) {
    CHECK(gpu_property_supported(p, G::nvidia, S::gpu_power));
    CHECK(gpu_property_supported(p, G::nvidia, S::gpu_usage));
    CHECK(gpu_property_supported(p, G::nvidia, S::gpu_frequency));
  }
  CHECK(gpu_property_supported(P::macos, G::apple, S::gpu_power));
  CHECK(gpu_property_supported(P::macos, G::amd, S::gpu_power));
  CHECK(gpu_property_supported(P::macos, G::intel, S::gpu_power));
  CHECK_FALSE(gpu_property_supported(P::macos, G::nvidia, S::gpu_power));
  CHECK_FALSE(gpu_property_supported(P::macos, G::apple, S::gpu_usage));
  CHECK_FALSE(gpu_property_supported(P::macos, G::apple, S::gpu_frequency));
  CHECK_FALSE(gpu_property_supported(P::linux_os, G::amd, S::gpu_power));
}

TEST_CASE("conformance check flags unsupported advertisements") {
  ProbeCapabilities caps;
  caps.platform = Platform::linux_os;
  caps.cpu_vendor = CpuVendor::intel;
  caps.metrics = {make("PACKAGE_ENERGY", Unit::joules, MetricKind::cumulative_energy,
                       MetricDomain::package()),
                  make("CPU_USAGE_0", Unit::percent, MetricKind::gauge,
                       MetricDomain::core(0))};
  CHECK(conformance_violations(caps).empty());

  caps.metrics.push_back(make("SYSTEM_POWER", Unit::watts,
                              MetricKind::instantaneous_power, MetricDomain::system()));
  CHECK(conformance_violations(caps).size() == 1);

  // The same advertisement is legitimate for the synthetic probe.
  caps.origin = ProbeOrigin::simulated;
  CHECK(conformance_violations(caps).empty());
}

TEST_CASE("gpu metrics need a matching vendor") {
  ProbeCapabilities caps;
  caps.platform = Platform::linux_os;
  caps.cpu_vendor = CpuVendor::intel;
  caps.metrics = {make("GPU0_POWER", Unit::watts, MetricKind::instantaneous_power,
                       MetricDomain::gpu(0))};
  CHECK(conformance_violations(caps).size() == 1);
  caps.gpu_vendors = {GpuVendor::nvidia};
  CHECK(conformance_violations(caps).empty());
}

TEST_CASE("host introspection returns sane values") {
  CHECK(logical_core_count() >= 1);
#ifdef __linux__
  CHECK(host_platform() == Platform::linux_os);
#endif
  CHECK_FALSE(platform_name(host_platform()).empty());
  CHECK_FALSE(cpu_vendor_name(detect_host_cpu_vendor()).empty());
}

}  // namespace
}  // namespace jouletrace
