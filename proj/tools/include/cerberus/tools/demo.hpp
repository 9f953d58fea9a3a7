#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace cerberus::tools {

struct DemoOptions {
  std::filesystem::path roster;
  std::string message;
  std::string account = "demo@example.org";
  /// When set, the demo hosts the moderators itself on the roster addresses
  /// with this policy, using the share files next to the roster.
  std::optional<std::string> policy;
  bool tamper = false;
  std::optional<std::filesystem::path> save_envelope;
  std::string auth_token;
  std::chrono::milliseconds deadline{2000};
};

/// Issue, seal, verify, report and recover, printing every intermediate
/// value. Returns 0 when the sender is recovered, 1 on a protocol failure
/// (rejection, too few votes, unreachable moderators).
int run_demo(const DemoOptions& options, std::ostream& out);

/// Files a saved envelope with every moderator and prints the outcome.
/// Same exit convention as run_demo.
int run_report(const std::filesystem::path& roster, const std::filesystem::path& envelope_file,
               const std::string& auth_token, std::ostream& out);

}  // namespace cerberus::tools
