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

namespace jouletrace {

ProbeSet detect_probes() {
  ProbeSet set;
  const auto add = [&set](std::unique_ptr<Probe> probe) {
    if (!probe) return false;
    set.probes.push_back(std::move(probe));
    return true;
  };

#if defined(__linux__)
  // Package energy: the raw counter device wins (finer units), the power
  // capping interface is the fallback.
  if (!add(internal::make_msr_probe(set.warnings))) {
    add(internal::make_powercap_probe(set.warnings));
  }
  bool have_package = false;
  for (const auto& probe : set.probes) {
    for (const auto& m : probe->capabilities().metrics) {
      have_package = have_package || m.domain.tag == MetricDomain::Tag::package;
    }
  }
  if (!have_package) {
    set.warnings.push_back(
        "no package energy source: load the msr module or run as root; traces will "
        "carry usage gauges only");
  }
  add(internal::make_nvml_probe(set.warnings));
  add(internal::make_sysinfo_probe(set.warnings));
#elif defined(__APPLE__)
  add(internal::make_smc_probe(set.warnings));
#elif defined(_WIN32)
  add(internal::make_nvml_probe(set.warnings));
  add(internal::make_windows_cpu_probe(set.warnings));
#endif

  // Advertised metrics must stay inside what this platform supports; a
  // violation is a bug in a backend, surfaced rather than hidden.
  for (const auto& probe : set.probes) {
    for (auto& violation : conformance_violations(probe->capabilities())) {
      set.warnings.push_back(probe->name() + ": " + violation);
    }
  }
  return set;
}

}  // namespace jouletrace
