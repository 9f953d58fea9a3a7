#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "cerberus/keyfile.hpp"
#include "cerberus/tools/daemon.hpp"

namespace cerberus::tools {

/// n moderator processes started from freshly dealt keys, each on a free
/// loopback port.
class LocalCluster {
 public:
  struct Options {
    std::string policy = "always-approve";
    std::string auth_token;
    std::vector<std::string> extra_args;
  };

  LocalCluster(const std::filesystem::path& cli, const Suite& suite, ThresholdParams params,
               const std::filesystem::path& work_dir, Rng& rng, Options options);
  LocalCluster(const std::filesystem::path& cli, const Suite& suite, ThresholdParams params,
               const std::filesystem::path& work_dir, Rng& rng)
      : LocalCluster(cli, suite, params, work_dir, rng, Options{}) {}

  /// Dealt roster with addresses replaced by the live ones.
  const ModeratorRoster& roster() const { return roster_; }
  const DealtKeys& keys() const { return keys_; }
  DaemonProcess& daemon(std::uint32_t index) { return *daemons_.at(index - 1); }

 private:
  DealtKeys keys_;
  ModeratorRoster roster_;
  std::vector<std::unique_ptr<DaemonProcess>> daemons_;
};

struct BenchConfig {
  std::vector<std::uint32_t> n_values{3, 5, 7};
  std::vector<std::size_t> batch_sizes{1};
  int reps = 10;
  int warmups = 2;
  std::filesystem::path cli;       // `cerberus` executable used for the daemons
  std::filesystem::path work_dir;  // scratch space for key files

  /// Throws InvalidArgument on empty sweeps, reps < 1 or batch sizes < 1.
  void validate() const;
  static std::uint32_t majority(std::uint32_t n) { return n / 2 + 1; }
};

struct BenchRecord {
  std::string scenario;  // token-creation | report-handling
  std::uint32_t n;
  std::uint32_t k;
  std::size_t batch;
  double mean_ms;  // per token or per report
  double std_ms;
  int reps;
};

/// Runs every (n, batch) cell against real daemon processes over HTTP.
/// `progress`, when given, receives one line per finished cell.
std::vector<BenchRecord> run_bench(const BenchConfig& config, std::ostream* progress = nullptr);

inline constexpr std::string_view kCsvHeader = "scenario,n,k,batch,mean_ms,std_ms,reps";
void write_csv(const std::vector<BenchRecord>& records, std::ostream& out);

/// Compose file running n moderators, one container each, from a keygen
/// output directory mounted at /keys.
std::string compose_file(std::uint32_t n, const std::string& image);

}  // namespace cerberus::tools
