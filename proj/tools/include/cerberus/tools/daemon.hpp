#pragma once

// Child moderator processes for the benchmark harness and integration tests.

#include <sys/types.h>

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "cerberus/bytes.hpp"

namespace cerberus::tools {

/// Printed by `cerberus moderator` once it accepts connections, followed by
/// host:port.
inline constexpr std::string_view kReadyPrefix = "listening on ";

class DaemonProcess {
 public:
  /// Runs `exe args...` and waits for the ready line on its stdout. Throws
  /// Error if the process exits or stays silent past `startup_timeout`.
  DaemonProcess(const std::filesystem::path& exe, const std::vector<std::string>& args,
                std::chrono::milliseconds startup_timeout = std::chrono::seconds(10));
  ~DaemonProcess();
  DaemonProcess(const DaemonProcess&) = delete;
  DaemonProcess& operator=(const DaemonProcess&) = delete;

  /// host:port the daemon reported.
  const std::string& address() const { return address_; }
  pid_t pid() const { return pid_; }
  bool running() const { return pid_ > 0; }

  /// SIGTERM, then SIGKILL if it lingers. Returns the exit status, or -1 if
  /// already stopped.
  int stop();

 private:
  pid_t pid_ = -1;
  std::string address_;
};

}  // namespace cerberus::tools
