#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "cerberus/keyfile.hpp"
#include "cerberus/protocol.hpp"
#include "cerberus/rng.hpp"
#include "cerberus/schnorr.hpp"
#include "cerberus/wire.hpp"

namespace cerberus {

struct ModeratorConfig {
  std::uint32_t index = 0;  // 0: take the index from the share file
  std::string listen = "127.0.0.1:7101";
  std::filesystem::path share_file;
  std::string policy = "always-approve";
  std::int64_t skew_secs = kDefaultSkewSecs;
  std::size_t nonce_pool = 65536;  // max open round-1 sessions
  std::int64_t session_ttl_secs = 60;
  std::string auth_token;  // empty: no shared-secret header required

  /// JSON object with any subset of: index, listen, share_file, policy,
  /// skew_secs, nonce_pool, session_ttl_secs, auth_token. Unknown keys are
  /// rejected.
  static ModeratorConfig load(const std::filesystem::path& path);
  static ModeratorConfig parse(std::string_view json_text);
  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
};

/// Round-1 state between a moderator's commitment and its signature share.
/// Every operation is atomic; a session's nonces can be taken at most once.
class SessionStore {
 public:
  using SteadyClock = std::function<std::chrono::steady_clock::time_point()>;

  SessionStore(std::size_t capacity, std::chrono::seconds ttl, SteadyClock clock = nullptr);

  /// Nullopt when the store is full after purging expired sessions.
  std::optional<wire::SessionId> open(TokenRequest request, SigningNonces nonces, Rng& rng);

  struct Claim {
    TokenRequest request;
    SigningNonces nonces;
  };
  enum class TakeError { kUnknown, kConsumed };
  /// Check-and-consume. The session stays behind as a consumed marker until
  /// it expires so replays can be told apart from unknown ids.
  std::variant<Claim, TakeError> take(const wire::SessionId& id);

  std::size_t size() const;
  void purge_expired();

 private:
  struct Session {
    std::optional<Claim> claim;
    std::chrono::steady_clock::time_point expires;
  };
  void purge_locked(std::chrono::steady_clock::time_point now);

  std::size_t capacity_;
  std::chrono::seconds ttl_;
  SteadyClock clock_;
  mutable std::mutex mu_;
  std::map<wire::SessionId, Session> sessions_;
};

/// A single moderator: key shares, vote policy and the three endpoint
/// handlers. Thread-safe.
class ModeratorNode {
 public:
  struct Options {
    std::int64_t skew_secs = kDefaultSkewSecs;
    std::size_t nonce_pool = 65536;
    std::int64_t session_ttl_secs = 60;
  };

  ModeratorNode(ModeratorShareFile keys, VotePolicy policy, Options options, UnixClock clock = system_unix_clock(),
                SessionStore::SteadyClock steady_clock = nullptr);

  std::uint32_t index() const { return keys_.index; }
  const Suite& suite() const { return *keys_.suite; }
  const ModeratorShareFile& keys() const { return keys_; }

  wire::Round1Result handle_token_round1(const TokenRequest& request);
  wire::Round2Result handle_token_round2(const wire::SessionId& session_id,
                                         std::span<const NonceCommitment> roster);
  VoteOutcome handle_report(const ReportRequest& report) const;

  struct HttpReply {
    int status;
    std::string body;
  };
  /// Decodes a JSON body for `path`, runs the handler(s) and encodes the
  /// reply. Never throws.
  HttpReply dispatch(std::string_view path, std::string_view body);

  std::size_t open_sessions() const { return sessions_.size(); }

 private:
  ModeratorShareFile keys_;
  VotePolicy policy_;
  Options options_;
  UnixClock clock_;
  SessionStore sessions_;
  SystemRng rng_;
};

/// Builds a node from a config: loads the share file, checks the index and
/// parses the policy.
std::unique_ptr<ModeratorNode> make_moderator(const ModeratorConfig& config);

}  // namespace cerberus
