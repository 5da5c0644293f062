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

#include <memory>
#include <string>
#include <vector>

#include "jouletrace/probe.hpp"

// Per-backend probe factories. Each returns nullptr when its source is not
// usable on this machine, appending the reason to `warnings` when the
// absence is worth telling the user about.
namespace jouletrace::internal {

#if defined(__linux__)
std::unique_ptr<Probe> make_msr_probe(std::vector<std::string>& warnings);
std::unique_ptr<Probe> make_powercap_probe(std::vector<std::string>& warnings);
std::unique_ptr<Probe> make_sysinfo_probe(std::vector<std::string>& warnings);
#endif
#if defined(__linux__) || defined(_WIN32)
std::unique_ptr<Probe> make_nvml_probe(std::vector<std::string>& warnings);
#endif
#if defined(__APPLE__)
std::unique_ptr<Probe> make_smc_probe(std::vector<std::string>& warnings);
#endif
#if defined(_WIN32)
std::unique_ptr<Probe> make_windows_cpu_probe(std::vector<std::string>& warnings);
#endif

}  // namespace jouletrace::internal
