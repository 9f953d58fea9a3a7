// cerberus: key ceremony, moderator daemon, demo flows and benchmark harness.
//
// Exit codes: 0 success, 1 protocol failure, 2 configuration error.

#include <signal.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "cerberus/client.hpp"
#include "cerberus/keyfile.hpp"
#include "cerberus/moderator.hpp"
#include "cerberus/server.hpp"
#include "cerberus/tools/bench.hpp"
#include "cerberus/tools/daemon.hpp"
#include "cerberus/tools/demo.hpp"

namespace fs = std::filesystem;
using namespace cerberus;

namespace {

constexpr int kOk = 0;
constexpr int kProtocolFailure = 1;
constexpr int kConfigError = 2;

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

// --- keygen -------------------------------------------------------------------

struct KeygenArgs {
  std::uint32_t k = 0;
  std::uint32_t n = 0;
  fs::path out;
  bool force = false;
  std::string suite = "ristretto255";
  std::string host = "127.0.0.1";
  std::uint16_t base_port = 7100;
  bool self_check = false;
};

// Reloads the written files and checks that every k-subset of shares
// reconstructs secrets matching the roster's public keys.
void self_check(const fs::path& dir, const ModeratorRoster& roster) {
  std::vector<ModeratorShareFile> files;
  for (std::uint32_t i = 1; i <= roster.params.n; ++i) files.push_back(ModeratorShareFile::load(share_file_name(dir, i)));
  const Suite& suite = *roster.suite;
  std::size_t subsets = 0;
  std::vector<std::uint32_t> pick;
  std::function<void(std::uint32_t)> visit = [&](std::uint32_t start) {
    if (pick.size() == roster.params.k) {
      std::vector<SecretShare> enc;
      std::vector<SecretShare> sig;
      for (auto i : pick) {
        enc.push_back({files[i].index, files[i].encryption_share});
        sig.push_back({files[i].index, files[i].signing_share});
      }
      if (!(suite.base_pow(reconstruct(enc)) == roster.keys.encryption_pk) ||
          !(suite.base_pow(reconstruct(sig)) == roster.keys.signing_pk)) {
        throw Error("self-check failed: shares do not reconstruct the group keys");
      }
      ++subsets;
      return;
    }
    for (std::uint32_t i = start; i < roster.params.n; ++i) {
      pick.push_back(i);
      visit(i + 1);
      pick.pop_back();
    }
  };
  visit(0);
  std::cout << "self-check ok: " << subsets << " subsets of " << roster.params.k << " reconstruct both group keys\n";
}

int cmd_keygen(const KeygenArgs& a) {
  const Suite& suite = Suite::by_name(a.suite);
  std::vector<std::string> addresses;
  for (std::uint32_t i = 1; i <= a.n; ++i) addresses.push_back(a.host + ":" + std::to_string(a.base_port + i));
  const DealtKeys keys = deal_keys(suite, {a.k, a.n}, system_rng(), addresses);
  write_keys(keys, a.out, a.force);
  for (const auto& m : keys.roster.moderators) {
    const fs::path cfg = a.out / ("moderator-" + std::to_string(m.index) + ".json");
    if (fs::exists(cfg) && !a.force) throw InvalidArgument(cfg.string() + " exists (use --force to overwrite)");
    std::ofstream(cfg) << "{\n  \"index\": " << m.index << ",\n  \"listen\": \"" << m.address
                       << "\",\n  \"share_file\": \"moderator-" << m.index
                       << ".share\",\n  \"policy\": \"always-approve\"\n}\n";
  }
  std::cout << "wrote " << a.n << " share files, " << a.n << " moderator configs and "
            << roster_file_name(a.out).string() << " (" << suite.name() << ", k=" << a.k << ", n=" << a.n << ")\n";
  if (a.self_check) self_check(a.out, keys.roster);
  return kOk;
}

// --- moderator ----------------------------------------------------------------

struct ModeratorArgs {
  std::optional<fs::path> config;
  std::optional<std::string> listen;
  std::optional<fs::path> share_file;
  std::optional<std::string> policy;
  std::optional<std::int64_t> skew_secs;
  std::optional<std::size_t> nonce_pool;
  std::optional<std::string> auth_token;
};

int cmd_moderator(const ModeratorArgs& a) {
  ModeratorConfig cfg = a.config ? ModeratorConfig::load(*a.config) : ModeratorConfig{};
  cfg.listen = env_or("CERBERUS_LISTEN", cfg.listen);
  cfg.auth_token = env_or("CERBERUS_AUTH_TOKEN", cfg.auth_token);
  if (a.listen) cfg.listen = *a.listen;
  if (a.share_file) cfg.share_file = *a.share_file;
  if (a.policy) cfg.policy = *a.policy;
  if (a.skew_secs) cfg.skew_secs = *a.skew_secs;
  if (a.nonce_pool) cfg.nonce_pool = *a.nonce_pool;
  if (a.auth_token) cfg.auth_token = *a.auth_token;

  std::shared_ptr<ModeratorNode> node = make_moderator(cfg);
  const auto [host, port] = split_host_port(cfg.listen);

  // Block termination signals before any thread starts so sigwait sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);
  ::signal(SIGPIPE, SIG_IGN);

  ModeratorServer server(node, cfg.auth_token);
  const int bound = server.bind(host, port);
  server.start();
  std::cout << "cerberus moderator " << node->index() << " (" << node->suite().name() << ", k="
            << node->keys().params.k << ", n=" << node->keys().params.n << ", policy " << cfg.policy << ") "
            << tools::kReadyPrefix << host << ":" << bound << std::endl;

  int sig = 0;
  sigwait(&stop_signals, &sig);
  server.stop();
  return kOk;
}

// --- bench --------------------------------------------------------------------

struct BenchArgs {
  std::vector<std::uint32_t> n_list{3, 5, 7};
  std::vector<std::size_t> batch_list{1, 4, 16, 64};
  int reps = 10;
  int warmups = 2;
  fs::path out = "bench.csv";
  std::optional<fs::path> emit_compose;
  std::string image = "cerberus:latest";
  std::optional<fs::path> work_dir;
};

int cmd_bench(const BenchArgs& a) {
  ::signal(SIGPIPE, SIG_IGN);
  if (a.emit_compose) {
    fs::create_directories(*a.emit_compose);
    for (auto n : a.n_list) {
      const fs::path p = *a.emit_compose / ("compose-n" + std::to_string(n) + ".yml");
      std::ofstream(p) << tools::compose_file(n, a.image);
      std::cout << "wrote " << p.string() << "\n";
    }
  }

  tools::BenchConfig cfg;
  cfg.n_values = a.n_list;
  cfg.batch_sizes = a.batch_list;
  cfg.reps = a.reps;
  cfg.warmups = a.warmups;
  cfg.cli = fs::read_symlink("/proc/self/exe");
  const bool own_work_dir = !a.work_dir;
  cfg.work_dir = a.work_dir ? *a.work_dir : fs::temp_directory_path() / ("cerberus-bench-" + std::to_string(::getpid()));

  const auto records = tools::run_bench(cfg, &std::cout);
  std::ofstream csv(a.out);
  if (!csv) throw InvalidArgument("cannot write " + a.out.string());
  tools::write_csv(records, csv);
  if (own_work_dir) fs::remove_all(cfg.work_dir);
  std::cout << "wrote " << records.size() << " rows to " << a.out.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold moderation for franked end-to-end encrypted messages"};
  app.require_subcommand(1);

  KeygenArgs keygen;
  auto* kg = app.add_subcommand("keygen", "Deal k-of-n moderator key shares and write the roster");
  kg->add_option("--k", keygen.k, "Threshold")->required()->check(CLI::Range(1, 65535));
  kg->add_option("--n", keygen.n, "Number of moderators")->required()->check(CLI::Range(1, 65535));
  kg->add_option("--out", keygen.out, "Output directory")->required();
  kg->add_flag("--force", keygen.force, "Overwrite existing key files");
  kg->add_option("--suite", keygen.suite, "Group suite")->check(CLI::IsMember({"ristretto255", "toy23"}));
  kg->add_option("--host", keygen.host, "Host written into the roster");
  kg->add_option("--base-port", keygen.base_port, "Moderator i listens on base-port + i");
  kg->add_flag("--self-check", keygen.self_check, "Reload the files and check every k-subset");

  ModeratorArgs mod;
  auto* md = app.add_subcommand("moderator", "Run one moderator daemon");
  md->add_option("--config", mod.config, "JSON config file")->check(CLI::ExistingFile);
  md->add_option("--listen", mod.listen, "host:port (port 0 picks a free port; env CERBERUS_LISTEN)");
  md->add_option("--share-file", mod.share_file, "Key share file");
  md->add_option("--policy", mod.policy, "always-approve | always-deny | keyword-list:w1,w2");
  md->add_option("--skew-secs", mod.skew_secs, "Accepted clock skew for token requests");
  md->add_option("--nonce-pool", mod.nonce_pool, "Maximum open round-1 sessions");
  md->add_option("--auth-token", mod.auth_token, "Shared secret required in X-Cerberus-Auth (env CERBERUS_AUTH_TOKEN)");

  BenchArgs bench;
  auto* bn = app.add_subcommand("bench", "Time token creation and report handling against local daemons");
  bn->add_option("--n-list", bench.n_list, "Moderator counts to sweep")->delimiter(',');
  bn->add_option("--batch-list", bench.batch_list, "Batch sizes to sweep")->delimiter(',');
  bn->add_option("--reps", bench.reps, "Timed repetitions per cell")->check(CLI::PositiveNumber);
  bn->add_option("--warmups", bench.warmups, "Untimed repetitions per cell")->check(CLI::NonNegativeNumber);
  bn->add_option("--out", bench.out, "CSV output path");
  bn->add_option("--emit-compose", bench.emit_compose, "Also write container compose files into this directory");
  bn->add_option("--image", bench.image, "Image name used in compose files");
  bn->add_option("--work-dir", bench.work_dir, "Scratch directory for key files");

  tools::DemoOptions demo;
  std::optional<std::string> demo_policy;
  std::optional<fs::path> demo_save;
  int deadline_ms = 2000;
  auto* dm = app.add_subcommand("demo", "Walk through issuance, sending, reporting and recovery");
  dm->add_option("--roster", demo.roster, "Roster file")->required()->check(CLI::ExistingFile);
  dm->add_option("--message", demo.message, "Message to send")->required();
  dm->add_option("--account", demo.account, "Sender account name");
  dm->add_option("--policy", demo_policy, "Host the moderators in-process with this policy");
  dm->add_flag("--tamper", demo.tamper, "Alter the message after sealing");
  dm->add_option("--save-envelope", demo_save, "Write the envelope for a later `report`");
  dm->add_option("--auth-token", demo.auth_token, "Shared secret for the moderators");
  dm->add_option("--deadline-ms", deadline_ms, "Per-round response deadline")->check(CLI::PositiveNumber);

  fs::path report_roster;
  fs::path report_envelope;
  std::string report_auth;
  auto* rp = app.add_subcommand("report", "Report a saved envelope and try to recover its sender");
  rp->add_option("--roster", report_roster, "Roster file")->required()->check(CLI::ExistingFile);
  rp->add_option("--envelope-file", report_envelope, "Envelope written by `demo --save-envelope`")
      ->required()
      ->check(CLI::ExistingFile);
  rp->add_option("--auth-token", report_auth, "Shared secret for the moderators");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*kg) return cmd_keygen(keygen);
    if (*md) return cmd_moderator(mod);
    if (*bn) return cmd_bench(bench);
    if (*dm) {
      demo.policy = demo_policy;
      demo.save_envelope = demo_save;
      demo.deadline = std::chrono::milliseconds(deadline_ms);
      demo.auth_token = env_or("CERBERUS_AUTH_TOKEN", demo.auth_token);
      return tools::run_demo(demo, std::cout);
    }
    if (*rp) return tools::run_report(report_roster, report_envelope, env_or("CERBERUS_AUTH_TOKEN", report_auth), std::cout);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const EncodingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kProtocolFailure;
  }
  return kConfigError;
}
