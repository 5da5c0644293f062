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

#include "jouletrace/probe.hpp"

#include "jouletrace/probes/simulated.hpp"

namespace jouletrace {

std::vector<MetricDescriptor> ProbeSet::schema() const {
  std::vector<MetricDescriptor> all;
  for (const auto& probe : probes) {
    const auto& metrics = probe->capabilities().metrics;
    all.insert(all.end(), metrics.begin(), metrics.end());
  }
  return all;
}

std::unique_ptr<Probe> make_simulated_probe(const std::string& spec) {
  if (spec != "simulated" && spec.rfind("simulated:", 0) != 0) return nullptr;
  if (spec == "simulated") {
    // Bare "simulated" means a nominal constant load.
    return parse_simulated_probe("simulated:constant:10");
  }
  return parse_simulated_probe(spec);
}

}  // namespace jouletrace
