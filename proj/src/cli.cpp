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

#include "jouletrace/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>
#include <utility>

#include <CLI11.hpp>

#include "jouletrace/analysis.hpp"
#include "jouletrace/capabilities.hpp"
#include "jouletrace/probe.hpp"
#include "jouletrace/runner.hpp"
#include "jouletrace/sampler.hpp"
#include "jouletrace/trace.hpp"

#ifdef _WIN32
#include <io.h>
#else
#include <unistd.h>
#endif

namespace jouletrace {
namespace {

bool stdout_is_terminal() {
#ifdef _WIN32
  return _isatty(_fileno(stdout)) != 0;
#else
  return isatty(STDOUT_FILENO) != 0;
#endif
}

bool quiet_mode() {
  const char* v = std::getenv("JOULETRACE_QUIET");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

// Metadata lines are one-per-key; control characters would corrupt the framing.
std::string sanitize_meta_value(std::string v) {
  for (char& c : v) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  return v;
}

constexpr const char* kFooter =
    R"(The measured command follows a literal '--' and is executed directly,
without a shell.

Exit codes:
  n   the measured command exited with code n (128+signal if killed by one)
  64  command line usage error
  65  the measured command could not be started
  66  the measured command hit --max-execution and was killed
  70  internal error

Environment:
  JOULETRACE_PROBE  default for --probe
  JOULETRACE_QUIET  silence probe warnings when set to a nonzero value

Examples:
  jouletrace -o trace.csv --summary -- stress-ng --cpu 4 --timeout 20s
  jouletrace -i 50 -- ./bench --size 4096
  jouletrace --probe simulated:sinusoid:30:10:2 -- sleep 2
  jouletrace probes
  jouletrace schedule workload idle --repetitions 20 --seed 7
  jouletrace analyze runs/ --baseline idle)";

struct AppBindings {
  CLI::App app{"Measure the energy a command consumes while it runs", "jouletrace"};
  CLI::App* measure = nullptr;
  CLI::App* analyze = nullptr;
  CLI::App* schedule = nullptr;
  CLI::App* probes = nullptr;
  CLI::Option* output_opt = nullptr;
  CLI::Option* command_output_opt = nullptr;
  std::string output_path;
  std::string command_output_path;
};

void build_app(AppBindings& b, CliConfig& config) {
  CLI::App& app = b.app;
  app.footer(kFooter);

  app.add_option("-i,--interval", config.interval_ms,
                 "Time between samples in milliseconds [default: 100]")
      ->check(CLI::Range(1, 3600000));
  app.add_option("-m,--max-execution", config.max_execution_s,
                 "Kill the measured command after this many seconds, 0 waits "
                 "forever [default: 0]");
  b.output_opt = app.add_option(
      "-o,--output", b.output_path,
      "Trace CSV destination; '-' forces stdout [default: energy.csv on a "
      "terminal, stdout when piped]");
  b.command_output_opt =
      app.add_option("--command-output", b.command_output_path,
                     "Write the command's stdout and stderr to this file");
  app.add_flag("-s,--summary", config.summary,
               "Print duration, energy, and average power to stderr when the "
               "run ends");
  app.add_option("--probe", config.probe_selection,
                 "Metric source: 'auto' detects hardware, 'simulated:...' runs "
                 "the synthetic probe")
      ->envname("JOULETRACE_PROBE");

  app.require_subcommand(0, 1);

  b.measure = app.add_subcommand(
      "measure", "Measure a command (the default when no subcommand is given)");
  b.measure->fallthrough();

  b.analyze = app.add_subcommand(
      "analyze", "Aggregate recorded traces into curves, a plot, and a comparison");
  b.analyze->fallthrough();
  b.analyze->add_option("runs_dir", config.runs_dir,
                        "Directory with one subdirectory of trace CSVs per condition")
      ->required();
  b.analyze->add_option("--baseline", config.baseline,
                        "Condition the others are compared against [default: idle]");
  b.analyze->add_option("--out", config.analyze_out_dir,
                        "Directory for generated files [default: the runs directory]");

  b.schedule = app.add_subcommand(
      "schedule", "Print a seeded random measurement order for the given conditions");
  b.schedule->fallthrough();
  b.schedule->add_option("conditions", config.conditions, "Condition names")
      ->required()
      ->expected(-1);
  b.schedule->add_option("-r,--repetitions", config.repetitions,
                         "Runs per condition [default: 20]")
      ->check(CLI::PositiveNumber);
  b.schedule->add_option("--seed", config.seed, "Shuffle seed [default: 1]");

  b.probes = app.add_subcommand("probes", "Report detected metric sources and exit");
  b.probes->fallthrough();
}

}  // namespace

std::string help_text() {
  AppBindings b;
  CliConfig config;
  build_app(b, config);
  return b.app.help();
}

CliConfig parse_args(const std::vector<std::string>& args) {
  // Everything after the first bare "--" is the measured command, opaque to
  // the flag parser so the command's own flags are never interpreted.
  std::vector<std::string> flag_args;
  std::vector<std::string> command;
  bool seen_separator = false;
  for (const std::string& a : args) {
    if (!seen_separator && a == "--") {
      seen_separator = true;
      continue;
    }
    (seen_separator ? command : flag_args).push_back(a);
  }

  AppBindings b;
  CliConfig config;
  build_app(b, config);

  std::vector<const char*> cargv;
  cargv.reserve(flag_args.size() + 1);
  cargv.push_back("jouletrace");
  for (const std::string& a : flag_args) cargv.push_back(a.c_str());

  try {
    b.app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream out;
    std::ostringstream err;
    int code = b.app.exit(e, out, err);
    if (code == 0) throw CliExit(0, out.str());
    throw CliExit(kExitUsage, err.str());
  }

  if (b.output_opt->count() > 0) config.output_path = b.output_path;
  if (b.command_output_opt->count() > 0)
    config.command_output_path = b.command_output_path;

  if (*b.analyze) {
    config.mode = CliMode::analyze;
  } else if (*b.schedule) {
    config.mode = CliMode::schedule;
  } else if (*b.probes) {
    config.mode = CliMode::probes;
  } else {
    config.mode = CliMode::measure;
  }

  if (config.mode != CliMode::measure && !command.empty()) {
    throw CliExit(kExitUsage,
                  "jouletrace: a '-- command' only makes sense when measuring\n"
                  "Run with --help for more information.");
  }
  if (config.mode == CliMode::measure) {
    config.argv = std::move(command);
    if (config.argv.empty()) {
      throw CliExit(kExitUsage,
                    "jouletrace: no command to measure; give it after '--', e.g. "
                    "jouletrace -- sleep 1\n"
                    "Run with --help for more information.");
    }
  }
  return config;
}

namespace {

// Maps --probe onto a probe set: hardware detection for "auto", the synthetic
// probe for "simulated..." specs. Malformed selections are usage errors.
ProbeSet resolve_probe_set(const CliConfig& config) {
  if (config.probe_selection == "auto") return detect_probes();
  std::unique_ptr<Probe> probe;
  try {
    probe = make_simulated_probe(config.probe_selection);
  } catch (const std::invalid_argument& e) {
    throw CliExit(kExitUsage, std::string("jouletrace: bad --probe value: ") + e.what());
  }
  if (probe == nullptr) {
    throw CliExit(kExitUsage, "jouletrace: bad --probe value '" + config.probe_selection +
                                  "' (expected 'auto' or 'simulated:...')");
  }
  ProbeSet set;
  set.probes.push_back(std::move(probe));
  return set;
}

void print_warnings(const ProbeSet& set) {
  if (quiet_mode()) return;
  for (const std::string& w : set.warnings) std::cerr << "jouletrace: " << w << "\n";
}

Probe* provider_of(const ProbeSet& set, const std::string& metric) {
  for (const auto& probe : set.probes) {
    for (const MetricDescriptor& m : probe->capabilities().metrics) {
      if (m.name == metric) return probe.get();
    }
  }
  return nullptr;
}

// Counter decode parameters are fixed per probe, so one priming read yields
// the column metadata the streaming writer must emit before the first row.
std::map<std::string, CounterInfo> prime_counter_info(
    const ProbeSet& set, const std::vector<MetricDescriptor>& schema) {
  std::map<std::string, CounterInfo> info;
  for (const MetricDescriptor& m : schema) {
    if (m.kind != MetricKind::cumulative_energy) continue;
    Probe* probe = provider_of(set, m.name);
    if (probe == nullptr) continue;
    try {
      RawCounterReading r = probe->read_counter(m.name);
      info[m.name] = CounterInfo{r.unit_joules, r.width_bits};
    } catch (const ProbeError&) {
      // The column stays unparameterized; readers fall back to inference.
    }
  }
  return info;
}

void print_summary_block(std::ostream& out, const Trace& trace) {
  double duration_s = 0.0;
  if (trace.rows.size() >= 2) {
    duration_s =
        static_cast<double>(trace.rows.back().time_ms - trace.rows.front().time_ms) /
        1000.0;
  }
  out << "summary:\n";
  try {
    RunSummary s = summarize(trace);
    out << "  duration:      " << format_double(s.duration_s) << " s\n"
        << "  samples:       " << s.sample_count << "\n"
        << "  energy:        " << format_double(s.total_energy_j) << " J (from "
        << s.energy_source << ")\n"
        << "  average power: " << format_double(s.avg_power_w) << " W\n";
  } catch (const NoEnergySourceError&) {
    out << "  duration:      " << format_double(duration_s) << " s\n"
        << "  samples:       " << trace.rows.size() << "\n"
        << "  energy:        unavailable (no energy-capable column)\n";
  } catch (const std::invalid_argument&) {
    out << "  duration:      " << format_double(duration_s) << " s\n"
        << "  samples:       " << trace.rows.size() << "\n"
        << "  energy:        unavailable (too few samples)\n";
  }
}

}  // namespace

int main_measure(const CliConfig& config) {
  ProbeSet set = resolve_probe_set(config);
  print_warnings(set);

  std::vector<MetricDescriptor> schema = set.schema();
  if (set.probes.empty() && !quiet_mode()) {
    std::cerr << "jouletrace: no probes detected; recording timing only\n";
  }

  // Output policy: explicit path wins; otherwise a terminal gets a default
  // file and a pipe gets the CSV on stdout.
  std::ofstream file;
  std::ostream* out = nullptr;
  bool csv_on_stdout = false;
  std::string out_name;
  if (config.output_path && *config.output_path != "-") {
    out_name = *config.output_path;
  } else if (!config.output_path && stdout_is_terminal()) {
    out_name = "energy.csv";
    if (!quiet_mode()) std::cerr << "jouletrace: writing trace to energy.csv\n";
  } else {
    csv_on_stdout = true;
  }
  if (csv_on_stdout) {
    out = &std::cout;
  } else {
    file.open(out_name, std::ios::binary | std::ios::trunc);
    if (!file.is_open()) {
      throw CliExit(kExitInternal,
                    "jouletrace: cannot open '" + out_name + "' for writing");
    }
    out = &file;
  }

  RunSpec spec;
  spec.argv = config.argv;
  spec.max_execution_s = config.max_execution_s;
  spec.command_output_path = config.command_output_path;
  if (csv_on_stdout && !config.command_output_path) {
    // The CSV owns stdout, so the command's passthrough moves to stderr.
    spec.redirect_fd = 2;
  }

  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("tool", "jouletrace");
  meta.emplace_back("version", "0.1.0");
  meta.emplace_back("platform", std::string(platform_name(host_platform())));
  meta.emplace_back("cpu_vendor",
                    std::string(cpu_vendor_name(detect_host_cpu_vendor())));
  meta.emplace_back("interval_ms", std::to_string(config.interval_ms));
  meta.emplace_back("command", sanitize_meta_value(join(config.argv, ' ')));
  {
    std::vector<std::string> names;
    names.reserve(set.probes.size());
    for (const auto& p : set.probes) names.push_back(p->name());
    meta.emplace_back("probes", sanitize_meta_value(join(names, ',')));
  }

  std::map<std::string, CounterInfo> counter_info = prime_counter_info(set, schema);
  TraceWriter writer(*out, schema, meta, counter_info);

  SamplerConfig sampler_config;
  sampler_config.interval = std::chrono::milliseconds(config.interval_ms);
  sampler_config.metrics = schema;

  StopSignal stop;
  Trace trace;
  std::exception_ptr sampler_error;
  std::promise<void> first_row_promise;
  std::future<void> first_row = first_row_promise.get_future();
  std::atomic<bool> first_row_signaled{false};
  auto signal_first_row = [&] {
    if (!first_row_signaled.exchange(true)) first_row_promise.set_value();
  };

  SessionHooks hooks;
  hooks.on_sample = [&](const Sample& s) {
    writer.write_row(s);
    signal_first_row();
  };
  const bool quiet = quiet_mode();
  hooks.on_warning = [quiet](const std::string& w) {
    if (!quiet) std::cerr << "jouletrace: " << w << "\n";
  };

  std::thread sampler([&] {
    try {
      trace = run_session(sampler_config, probe_pointers(set), stop, hooks);
    } catch (...) {
      sampler_error = std::current_exception();
    }
    signal_first_row();
  });

  // The first row brackets the command start, so the trace always covers the
  // full child lifetime.
  first_row.wait();
  if (sampler_error) {
    sampler.join();
    std::rethrow_exception(sampler_error);
  }

  RunOutcome outcome = execute(spec, stop);
  sampler.join();
  if (sampler_error) std::rethrow_exception(sampler_error);
  out->flush();
  if (!out->good()) {
    throw CliExit(kExitInternal, "jouletrace: trace output stream failed");
  }

  if (outcome.status == RunStatus::spawn_error) {
    std::cerr << "jouletrace: error: " << outcome.error << "\n";
    return kExitSpawnError;
  }
  if (outcome.status == RunStatus::timed_out) {
    std::cerr << "jouletrace: command exceeded " << config.max_execution_s
              << " s and was killed\n";
  }
  if (config.summary) print_summary_block(std::cerr, trace);
  return outcome.status == RunStatus::timed_out ? kExitTimeout : outcome.exit_code;
}

int main_probes(const CliConfig& config) {
  ProbeSet set = resolve_probe_set(config);
  print_warnings(set);

  std::cout << "host: " << platform_name(host_platform()) << " / "
            << cpu_vendor_name(detect_host_cpu_vendor()) << " / "
            << logical_core_count() << " logical cores\n";
  if (set.probes.empty()) {
    std::cout << "no probes detected\n";
    return 0;
  }
  for (const auto& probe : set.probes) {
    std::cout << "\nprobe: " << probe->name() << "\n";
    for (const MetricDescriptor& m : probe->capabilities().metrics) {
      std::cout << "  " << m.name << "  " << kind_name(m.kind) << "  "
                << unit_name(m.unit) << "  " << domain_name(m.domain);
      if (m.kind == MetricKind::cumulative_energy) {
        try {
          RawCounterReading r = probe->read_counter(m.name);
          std::cout << "  (counter: " << r.width_bits << "-bit, "
                    << format_double(r.unit_joules) << " J/unit)";
        } catch (const ProbeError& e) {
          std::cout << "  (unreadable: " << e.what() << ")";
        }
      }
      std::cout << "\n";
    }
  }
  return 0;
}

int main_schedule(const CliConfig& config) {
  std::vector<std::string> order;
  try {
    order = randomized_schedule(config.conditions, config.repetitions, config.seed);
  } catch (const std::invalid_argument& e) {
    throw CliExit(kExitUsage, std::string("jouletrace: ") + e.what());
  }
  for (const std::string& entry : order) std::cout << entry << "\n";
  return 0;
}

namespace {

struct ConditionRuns {
  std::string name;
  std::vector<PowerSeries> runs;
};

std::vector<ConditionRuns> load_conditions(const std::string& runs_dir) {
  namespace fs = std::filesystem;
  std::vector<ConditionRuns> conditions;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(runs_dir)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const fs::path& dir : dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) continue;
    ConditionRuns cond;
    cond.name = dir.filename().string();
    for (const fs::path& f : files) {
      try {
        Trace trace = read_csv(f.string());
        cond.runs.push_back(
            power_series(trace, cond.name + "/" + f.stem().string()));
      } catch (const std::exception& e) {
        throw CliExit(kExitInternal,
                      "jouletrace: " + f.string() + ": " + e.what());
      }
    }
    conditions.push_back(std::move(cond));
  }
  return conditions;
}

}  // namespace

int main_analyze(const CliConfig& config) {
  namespace fs = std::filesystem;

  std::vector<ConditionRuns> conditions;
  try {
    conditions = load_conditions(config.runs_dir);
  } catch (const fs::filesystem_error& e) {
    throw CliExit(kExitInternal, std::string("jouletrace: ") + e.what());
  }
  if (conditions.empty()) {
    throw CliExit(kExitUsage,
                  "jouletrace: no condition directories with .csv traces under '" +
                      config.runs_dir + "'");
  }

  LabeledCurves curves;
  for (const ConditionRuns& cond : conditions) {
    try {
      curves.emplace_back(cond.name, aggregate(cond.runs));
    } catch (const std::invalid_argument& e) {
      throw CliExit(kExitUsage, "jouletrace: condition '" + cond.name +
                                    "': " + e.what());
    }
  }

  fs::path out_dir =
      config.analyze_out_dir.empty() ? fs::path(config.runs_dir)
                                     : fs::path(config.analyze_out_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw CliExit(kExitInternal, "jouletrace: cannot create '" +
                                     out_dir.string() + "': " + ec.message());
  }

  const fs::path svg_path = out_dir / "power_curves.svg";
  try {
    emit_plot(curves, svg_path.string());
  } catch (const std::exception& e) {
    throw CliExit(kExitInternal,
                  "jouletrace: " + svg_path.string() + ": " + e.what());
  }
  std::cout << "wrote " << svg_path.string() << "\n";
  std::cout << "wrote " << (out_dir / "power_curves.csv").string() << "\n";

  if (curves.size() >= 2) {
    std::size_t baseline_index = 0;
    bool found = false;
    for (std::size_t i = 0; i < curves.size(); ++i) {
      if (curves[i].first == config.baseline) {
        baseline_index = i;
        found = true;
        break;
      }
    }
    if (!found && !quiet_mode()) {
      std::cerr << "jouletrace: baseline '" << config.baseline
                << "' not found; comparing against '" << curves[0].first << "'\n";
    }

    const fs::path cmp_path = out_dir / "comparison.txt";
    std::ofstream cmp(cmp_path);
    if (!cmp.is_open()) {
      throw CliExit(kExitInternal,
                    "jouletrace: cannot open '" + cmp_path.string() + "' for writing");
    }
    const auto& [baseline_label, baseline_curve] = curves[baseline_index];
    bool first_block = true;
    for (std::size_t i = 0; i < curves.size(); ++i) {
      if (i == baseline_index) continue;
      ComparisonReport report;
      try {
        report = compare(curves[i].second, baseline_curve);
      } catch (const std::invalid_argument& e) {
        throw CliExit(kExitUsage, "jouletrace: cannot compare '" + curves[i].first +
                                      "' with '" + baseline_label + "': " + e.what());
      }
      if (!first_block) cmp << "\n";
      first_block = false;
      write_comparison(cmp, curves[i].first, baseline_label, report,
                       baseline_curve.interval_ms);
    }
    std::cout << "wrote " << cmp_path.string() << "\n";
  } else if (!quiet_mode()) {
    std::cerr << "jouletrace: one condition only, skipping the comparison report\n";
  }
  return 0;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);

  CliConfig config;
  try {
    config = parse_args(args);
  } catch (const CliExit& e) {
    std::string text = e.what();
    if (!text.empty() && text.back() != '\n') text.push_back('\n');
    (e.code() == 0 ? std::cout : std::cerr) << text;
    return e.code();
  }

  try {
    switch (config.mode) {
      case CliMode::measure:
        return main_measure(config);
      case CliMode::analyze:
        return main_analyze(config);
      case CliMode::schedule:
        return main_schedule(config);
      case CliMode::probes:
        return main_probes(config);
    }
    return kExitInternal;
  } catch (const CliExit& e) {
    std::string text = e.what();
    if (!text.empty() && text.back() != '\n') text.push_back('\n');
    (e.code() == 0 ? std::cout : std::cerr) << text;
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "jouletrace: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace jouletrace
