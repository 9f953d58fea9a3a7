#include "cerberus/tools/demo.hpp"

#include <fstream>
#include <iterator>
#include <memory>
#include <ostream>
#include <vector>

#include "cerberus/client.hpp"
#include "cerberus/server.hpp"

namespace cerberus::tools {

namespace {

std::string join(const std::vector<std::uint32_t>& v) {
  std::string s;
  for (auto i : v) s += (s.empty() ? "" : ",") + std::to_string(i);
  return "[" + s + "]";
}

int print_outcome(const ReportOutcome& outcome, const ModeratorRoster& roster, std::ostream& out) {
  out << "[report] approved " << join(outcome.approved) << " denied " << join(outcome.denied) << " rejected "
      << join(outcome.rejected) << " unreachable " << join(outcome.unreachable) << " faulty " << join(outcome.faulty)
      << "\n";
  if (outcome.recovered()) {
    out << "recovered identity: " << outcome.identity->hex() << "\n";
    return 0;
  }
  if (!outcome.rejected.empty() && outcome.approvals == 0) {
    out << "envelope rejected by moderators " << join(outcome.rejected) << "\n";
  } else {
    out << "insufficient votes: " << outcome.approvals << " of " << roster.params.k << " required approvals\n";
  }
  return 1;
}

// In-process moderators bound to the roster's addresses.
std::vector<std::unique_ptr<ModeratorServer>> host_moderators(const ModeratorRoster& roster,
                                                              const std::filesystem::path& dir,
                                                              const std::string& policy, const std::string& auth) {
  std::vector<std::unique_ptr<ModeratorServer>> servers;
  for (const auto& m : roster.moderators) {
    auto keys = ModeratorShareFile::load(share_file_name(dir, m.index));
    auto node = std::make_shared<ModeratorNode>(std::move(keys), VotePolicy::parse(policy), ModeratorNode::Options{});
    auto server = std::make_unique<ModeratorServer>(node, auth);
    auto [host, port] = split_host_port(m.address);
    server->bind(host, port);
    server->start();
    servers.push_back(std::move(server));
  }
  return servers;
}

}  // namespace

int run_demo(const DemoOptions& options, std::ostream& out) {
  const ModeratorRoster roster = ModeratorRoster::load(options.roster);
  const Suite& suite = *roster.suite;
  std::vector<std::unique_ptr<ModeratorServer>> hosted;
  if (options.policy) {
    hosted = host_moderators(roster, options.roster.parent_path(), *options.policy, options.auth_token);
    out << "hosting " << hosted.size() << " moderators in-process with policy " << *options.policy << "\n";
  }

  Client client(roster, std::make_shared<HttpTransport>(options.auth_token), {options.deadline, 2});
  const Identity id = Identity::from_account(options.account);
  out << "roster: " << suite.name() << " k=" << roster.params.k << " n=" << roster.params.n << "\n";
  out << "sender: " << options.account << " identity " << id.hex() << "\n";

  Rng& rng = system_rng();
  const auto issued = client.obtain_tokens({id, 1}, system_unix_clock(), rng).at(0);
  const Token& token = issued.token;
  out << "[token] x1 = " << to_hex(token.x1.to_bytes()) << "\n";
  out << "[token] pk_eph = " << to_hex(token.pk_eph.encode()) << "\n";
  out << "[token] issued_at = " << token.issued_at << "\n";
  out << "[token] sig_mod = " << to_hex(token.sig_mod.to_bytes()) << "\n";

  TokenLedger ledger;
  MessageEnvelope env = seal_message(bytes_of(options.message), token, issued.sk_eph, ledger, rng);
  out << "[seal] message = \"" << options.message << "\"\n";
  out << "[seal] x2 = " << to_hex(env.x2) << "\n";
  out << "[seal] sig_src = " << to_hex(env.sig_src.to_bytes()) << "\n";

  if (options.tamper) {
    env.message.push_back('!');
    out << "[tamper] message changed to \"" << std::string(env.message.begin(), env.message.end()) << "\"\n";
  }
  if (options.save_envelope) {
    const Bytes wire = env.to_bytes();
    std::ofstream f(*options.save_envelope, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(wire.data()), static_cast<std::streamsize>(wire.size()));
    if (!f) throw Error("cannot write " + options.save_envelope->string());
    out << "[seal] envelope saved to " << options.save_envelope->string() << "\n";
  }

  const EnvelopeCheck check = verify_envelope(env, roster.keys.signing_pk);
  out << "[verify] receiver check: " << to_string(check) << "\n";

  const ReportOutcome outcome = client.report_and_recover(env);
  const int rc = print_outcome(outcome, roster, out);
  if (rc == 0) out << "identity matches sender: " << (outcome.identity == id ? "yes" : "no") << "\n";
  for (auto& s : hosted) s->stop();
  return rc;
}

int run_report(const std::filesystem::path& roster_path, const std::filesystem::path& envelope_file,
               const std::string& auth_token, std::ostream& out) {
  const ModeratorRoster roster = ModeratorRoster::load(roster_path);
  std::ifstream f(envelope_file, std::ios::binary);
  if (!f) throw InvalidArgument("cannot read " + envelope_file.string());
  const Bytes wire((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const MessageEnvelope env = MessageEnvelope::from_bytes(*roster.suite, wire);

  out << "[report] message = \"" << std::string(env.message.begin(), env.message.end()) << "\"\n";
  out << "[verify] envelope check: " << to_string(verify_envelope(env, roster.keys.signing_pk)) << "\n";
  Client client(roster, std::make_shared<HttpTransport>(auth_token));
  return print_outcome(client.report_and_recover(env), roster, out);
}

}  // namespace cerberus::tools
