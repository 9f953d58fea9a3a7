#include "cerberus/tools/bench.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "cerberus/client.hpp"

namespace cerberus::tools {

namespace fs = std::filesystem;

LocalCluster::LocalCluster(const fs::path& cli, const Suite& suite, ThresholdParams params, const fs::path& work_dir,
                           Rng& rng, Options options)
    : keys_(deal_keys(suite, params, rng)), roster_(keys_.roster) {
  write_keys(keys_, work_dir, true);
  for (std::uint32_t i = 1; i <= params.n; ++i) {
    std::vector<std::string> args{"moderator", "--share-file", share_file_name(work_dir, i).string(), "--listen",
                                  "127.0.0.1:0", "--policy", options.policy};
    if (!options.auth_token.empty()) {
      args.push_back("--auth-token");
      args.push_back(options.auth_token);
    }
    args.insert(args.end(), options.extra_args.begin(), options.extra_args.end());
    daemons_.push_back(std::make_unique<DaemonProcess>(cli, args));
    roster_.moderators[i - 1].address = daemons_.back()->address();
  }
}

void BenchConfig::validate() const {
  if (n_values.empty() || batch_sizes.empty()) throw InvalidArgument("n and batch sweeps must not be empty");
  if (reps < 1) throw InvalidArgument("reps must be at least 1");
  if (warmups < 0) throw InvalidArgument("warmups must be non-negative");
  for (auto n : n_values) {
    if (n < 1 || n > 64) throw InvalidArgument("n must be in 1..64");
  }
  for (auto b : batch_sizes) {
    if (b < 1) throw InvalidArgument("batch sizes must be at least 1");
  }
  if (cli.empty()) throw InvalidArgument("path to the cerberus executable is required");
}

namespace {

struct Stats {
  double mean;
  double std;
};

Stats summarize(const std::vector<double>& xs) {
  double sum = 0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double sq = 0;
  for (double x : xs) sq += (x - mean) * (x - mean);
  const double std = xs.size() > 1 ? std::sqrt(sq / static_cast<double>(xs.size() - 1)) : 0.0;
  return {mean, std};
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<BenchRecord> run_bench(const BenchConfig& config, std::ostream* progress) {
  config.validate();
  const Suite& suite = Suite::ristretto255();
  Rng& rng = system_rng();
  const Identity id = Identity::from_account("bench@example.org");
  std::vector<BenchRecord> out;

  for (std::uint32_t n : config.n_values) {
    const ThresholdParams params{BenchConfig::majority(n), n};
    LocalCluster cluster(config.cli, suite, params, config.work_dir / ("n" + std::to_string(n)), rng);
    Client client(cluster.roster(), std::make_shared<HttpTransport>());
    const UnixClock clock = system_unix_clock();

    for (std::size_t batch : config.batch_sizes) {
      auto run_once = [&](std::vector<double>* token_ms, std::vector<double>* report_ms) {
        const auto t0 = std::chrono::steady_clock::now();
        auto tokens = client.obtain_tokens({id, batch}, clock, rng);
        const double token_total = ms_since(t0);

        // Sealing is a sender-side step outside both measured operations.
        TokenLedger ledger;
        std::vector<MessageEnvelope> envelopes;
        for (const auto& t : tokens) envelopes.push_back(seal_message(bytes_of("benchmark message"), t.token, t.sk_eph, ledger, rng));

        const auto t1 = std::chrono::steady_clock::now();
        for (const auto& env : envelopes) {
          if (!client.report_and_recover(env).recovered()) throw Error("benchmark report was not recovered");
        }
        const double report_total = ms_since(t1);
        if (token_ms) token_ms->push_back(token_total / static_cast<double>(batch));
        if (report_ms) report_ms->push_back(report_total / static_cast<double>(batch));
      };

      for (int w = 0; w < config.warmups; ++w) run_once(nullptr, nullptr);
      std::vector<double> token_ms;
      std::vector<double> report_ms;
      for (int r = 0; r < config.reps; ++r) run_once(&token_ms, &report_ms);

      const Stats ts = summarize(token_ms);
      const Stats rs = summarize(report_ms);
      out.push_back({"token-creation", n, params.k, batch, ts.mean, ts.std, config.reps});
      out.push_back({"report-handling", n, params.k, batch, rs.mean, rs.std, config.reps});
      if (progress) {
        *progress << "n=" << n << " k=" << params.k << " batch=" << batch << std::fixed << std::setprecision(3)
                  << " token=" << ts.mean << "ms report=" << rs.mean << "ms\n";
        progress->flush();
      }
    }
  }
  return out;
}

void write_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.scenario << ',' << r.n << ',' << r.k << ',' << r.batch << ',' << std::fixed << std::setprecision(4)
        << r.mean_ms << ',' << r.std_ms << ',' << r.reps << '\n';
  }
}

std::string compose_file(std::uint32_t n, const std::string& image) {
  std::ostringstream y;
  y << "# Generated by `cerberus bench --emit-compose`. Run `cerberus keygen --k "
    << BenchConfig::majority(n) << " --n " << n << " --out keys` first.\n";
  y << "services:\n";
  for (std::uint32_t i = 1; i <= n; ++i) {
    y << "  moderator-" << i << ":\n"
      << "    image: " << image << "\n"
      << "    command: [\"cerberus\", \"moderator\", \"--share-file\", \"/keys/moderator-" << i
      << ".share\", \"--listen\", \"0.0.0.0:" << 7100 + i << "\"]\n"
      << "    volumes: [\"./keys:/keys:ro\"]\n"
      << "    ports: [\"" << 7100 + i << ":" << 7100 + i << "\"]\n";
  }
  return y.str();
}

}  // namespace cerberus::tools
