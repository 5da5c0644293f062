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

#include "jouletrace/runner.hpp"

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <thread>

#if defined(_WIN32)
#include <windows.h>
#else
#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>
#endif

namespace jouletrace {

namespace {

constexpr unsigned kGraceSeconds = 2;

void validate(const RunSpec& spec) {
  if (spec.argv.empty() || spec.argv[0].empty()) {
    throw std::invalid_argument("runner: argv must start with a non-empty command");
  }
}

}  // namespace

#if !defined(_WIN32)

namespace {

std::string errno_text(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

// Signals child-completion to the watchdog that enforces the timeout.
struct ReapFlag {
  std::mutex mu;
  std::condition_variable cv;
  bool reaped = false;

  void set() {
    {
      std::lock_guard<std::mutex> lock(mu);
      reaped = true;
    }
    cv.notify_all();
  }
  // Returns true when the child was reaped within the duration.
  bool wait_for(std::chrono::seconds d) {
    std::unique_lock<std::mutex> lock(mu);
    return cv.wait_for(lock, d, [this] { return reaped; });
  }
};

}  // namespace

RunOutcome execute(const RunSpec& spec, StopSignal& stop) {
  validate(spec);
  RunOutcome outcome;

  int output_fd = -1;
  if (spec.command_output_path) {
    output_fd = ::open(spec.command_output_path->c_str(),
                       O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (output_fd < 0) {
      outcome.status = RunStatus::spawn_error;
      outcome.error = errno_text("opening command output file");
      stop.fire();
      return outcome;
    }
  } else if (spec.redirect_fd >= 0) {
    output_fd = spec.redirect_fd;
  }

  // The exec-error pipe closes on successful exec; otherwise it carries the
  // child's errno back to us.
  int exec_pipe[2];
  if (::pipe2(exec_pipe, O_CLOEXEC) != 0) {
    if (spec.command_output_path && output_fd >= 0) ::close(output_fd);
    outcome.status = RunStatus::spawn_error;
    outcome.error = errno_text("pipe");
    stop.fire();
    return outcome;
  }

  std::vector<char*> argv;
  argv.reserve(spec.argv.size() + 1);
  for (const auto& arg : spec.argv) argv.push_back(const_cast<char*>(arg.c_str()));
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(exec_pipe[0]);
    ::close(exec_pipe[1]);
    if (spec.command_output_path && output_fd >= 0) ::close(output_fd);
    outcome.status = RunStatus::spawn_error;
    outcome.error = errno_text("fork");
    stop.fire();
    return outcome;
  }

  if (pid == 0) {
    // Child. Own process group so a timeout can terminate every descendant.
    ::setpgid(0, 0);
    if (output_fd >= 0) {
      while (::dup2(output_fd, STDOUT_FILENO) < 0 && errno == EINTR) {
      }
      while (::dup2(output_fd, STDERR_FILENO) < 0 && errno == EINTR) {
      }
    }
    ::execvp(argv[0], argv.data());
    const int err = errno;
    ssize_t n = ::write(exec_pipe[1], &err, sizeof(err));
    (void)n;
    ::_exit(127);
  }

  // Parent. Mirror the setpgid call to close the fork/exec race.
  ::setpgid(pid, pid);
  ::close(exec_pipe[1]);
  if (spec.command_output_path && output_fd >= 0) ::close(output_fd);

  int exec_errno = 0;
  ssize_t n;
  while ((n = ::read(exec_pipe[0], &exec_errno, sizeof(exec_errno))) < 0 && errno == EINTR) {
  }
  ::close(exec_pipe[0]);
  const bool exec_failed = n == static_cast<ssize_t>(sizeof(exec_errno));

  ReapFlag reap;
  bool timed_out = false;
  std::thread watchdog;
  if (spec.max_execution_s > 0 && !exec_failed) {
    watchdog = std::thread([&] {
      if (reap.wait_for(std::chrono::seconds(spec.max_execution_s))) return;
      timed_out = true;
      ::killpg(pid, SIGTERM);
      if (reap.wait_for(std::chrono::seconds(kGraceSeconds))) return;
      ::killpg(pid, SIGKILL);
    });
  }

  int status = 0;
  pid_t waited;
  while ((waited = ::waitpid(pid, &status, 0)) < 0 && errno == EINTR) {
  }
  reap.set();
  if (watchdog.joinable()) watchdog.join();

  // Sweep group stragglers so no load leaks into the next measurement. The
  // group id stays valid while any member lives; an empty group is ESRCH.
  ::killpg(pid, SIGKILL);

  if (exec_failed) {
    outcome.status = RunStatus::spawn_error;
    outcome.error = spec.argv[0] + ": " + std::strerror(exec_errno);
  } else if (timed_out) {
    outcome.status = RunStatus::timed_out;
    outcome.exit_code = 0;
  } else if (waited == pid && WIFEXITED(status)) {
    outcome.status = RunStatus::exited;
    outcome.exit_code = WEXITSTATUS(status);
  } else if (waited == pid && WIFSIGNALED(status)) {
    outcome.status = RunStatus::exited;
    outcome.exit_code = 128 + WTERMSIG(status);
  } else {
    outcome.status = RunStatus::spawn_error;
    outcome.error = "waitpid: unexpected status";
  }

  stop.fire();
  return outcome;
}

#else  // _WIN32

RunOutcome execute(const RunSpec& spec, StopSignal& stop) {
  validate(spec);
  RunOutcome outcome;

  // Build a command line with Windows argument quoting.
  std::string cmdline;
  for (const auto& arg : spec.argv) {
    if (!cmdline.empty()) cmdline += ' ';
    if (arg.find_first_of(" \t\"") == std::string::npos) {
      cmdline += arg;
      continue;
    }
    cmdline += '"';
    unsigned backslashes = 0;
    for (char c : arg) {
      if (c == '\\') {
        ++backslashes;
        continue;
      }
      if (c == '"') {
        cmdline.append(backslashes * 2 + 1, '\\');
        cmdline += '"';
      } else {
        cmdline.append(backslashes, '\\');
        cmdline += c;
      }
      backslashes = 0;
    }
    cmdline.append(backslashes * 2, '\\');
    cmdline += '"';
  }

  SECURITY_ATTRIBUTES sa{sizeof(SECURITY_ATTRIBUTES), nullptr, TRUE};
  HANDLE output = INVALID_HANDLE_VALUE;
  if (spec.command_output_path) {
    output = CreateFileA(spec.command_output_path->c_str(), GENERIC_WRITE, FILE_SHARE_READ,
                         &sa, CREATE_ALWAYS, FILE_ATTRIBUTE_NORMAL, nullptr);
    if (output == INVALID_HANDLE_VALUE) {
      outcome.status = RunStatus::spawn_error;
      outcome.error = "opening command output file failed";
      stop.fire();
      return outcome;
    }
  }

  STARTUPINFOA si{};
  si.cb = sizeof(si);
  if (output != INVALID_HANDLE_VALUE) {
    si.dwFlags = STARTF_USESTDHANDLES;
    si.hStdInput = GetStdHandle(STD_INPUT_HANDLE);
    si.hStdOutput = output;
    si.hStdError = output;
  }
  PROCESS_INFORMATION pi{};

  // The job object stands in for a process group: terminating it reaches
  // every descendant.
  HANDLE job = CreateJobObjectA(nullptr, nullptr);
  JOBOBJECT_EXTENDED_LIMIT_INFORMATION limits{};
  limits.BasicLimitInformation.LimitFlags = JOB_OBJECT_LIMIT_KILL_ON_JOB_CLOSE;
  if (job) {
    SetInformationJobObject(job, JobObjectExtendedLimitInformation, &limits, sizeof(limits));
  }

  const BOOL created =
      CreateProcessA(nullptr, cmdline.data(), nullptr, nullptr,
                     output != INVALID_HANDLE_VALUE ? TRUE : FALSE,
                     CREATE_SUSPENDED, nullptr, nullptr, &si, &pi);
  if (!created) {
    if (output != INVALID_HANDLE_VALUE) CloseHandle(output);
    if (job) CloseHandle(job);
    outcome.status = RunStatus::spawn_error;
    outcome.error = spec.argv[0] + ": CreateProcess failed";
    stop.fire();
    return outcome;
  }
  if (job) AssignProcessToJobObject(job, pi.hProcess);
  ResumeThread(pi.hThread);
  CloseHandle(pi.hThread);
  if (output != INVALID_HANDLE_VALUE) CloseHandle(output);

  const DWORD wait_ms =
      spec.max_execution_s > 0 ? spec.max_execution_s * 1000u : INFINITE;
  const DWORD waited = WaitForSingleObject(pi.hProcess, wait_ms);
  if (waited == WAIT_TIMEOUT) {
    // No graceful console signal exists for an arbitrary child here; the
    // grace period separates job termination from handle teardown.
    if (job) TerminateJobObject(job, 1);
    TerminateProcess(pi.hProcess, 1);
    WaitForSingleObject(pi.hProcess, kGraceSeconds * 1000u);
    outcome.status = RunStatus::timed_out;
  } else {
    DWORD code = 0;
    GetExitCodeProcess(pi.hProcess, &code);
    outcome.status = RunStatus::exited;
    outcome.exit_code = static_cast<int>(code);
  }
  CloseHandle(pi.hProcess);
  if (job) CloseHandle(job);
  stop.fire();
  return outcome;
}

#endif

}  // namespace jouletrace
