#pragma once

// Client-side orchestration over a moderator roster: batched token issuance
// with first-k collection, and report fan-out with identity recovery.

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "cerberus/keyfile.hpp"
#include "cerberus/protocol.hpp"
#include "cerberus/transport.hpp"

namespace cerberus {

struct ClientOptions {
  /// Per-round deadline. Collection stops early once k valid replies arrive.
  std::chrono::milliseconds deadline{2000};
  /// Extra attempts after a moderator fails between round 1 and round 2 or
  /// returns a bad signature share.
  int max_retries = 2;
};

struct TokenBatchRequest {
  Identity id_src;
  std::size_t batch_size = 1;
};

struct IssuedToken {
  Token token;
  Scalar sk_eph;
};

/// Fewer than k moderators produced usable responses.
class TokenIssuanceError : public Error {
 public:
  TokenIssuanceError(std::vector<std::uint32_t> unreachable, std::vector<std::uint32_t> faulty);
  const std::vector<std::uint32_t>& unreachable() const { return unreachable_; }
  const std::vector<std::uint32_t>& faulty() const { return faulty_; }

 private:
  std::vector<std::uint32_t> unreachable_;
  std::vector<std::uint32_t> faulty_;
};

struct ReportOutcome {
  std::optional<Identity> identity;  // set iff approvals >= k
  std::size_t approvals = 0;
  std::vector<std::uint32_t> approved;
  std::vector<std::uint32_t> denied;
  std::vector<std::uint32_t> rejected;     // envelope failed the moderator's checks
  std::vector<std::uint32_t> unreachable;  // includes deadline misses
  std::vector<std::uint32_t> faulty;       // malformed or mismatched responses

  bool recovered() const { return identity.has_value(); }
};

class Client {
 public:
  Client(ModeratorRoster roster, std::shared_ptr<Transport> transport, ClientOptions options = {});

  const ModeratorRoster& roster() const { return roster_; }

  /// Runs both signing rounds for the whole batch, one request per moderator
  /// per round. Throws TokenIssuanceError naming unreachable and faulty
  /// moderators when fewer than k cooperate.
  std::vector<IssuedToken> obtain_tokens(const TokenBatchRequest& batch, const UnixClock& clock, Rng& rng);

  /// Queries all moderators and recovers the sender once k approvals
  /// arrive. Without k approvals the outcome carries the vote tally.
  ReportOutcome report_and_recover(const MessageEnvelope& envelope);

 private:
  ModeratorRoster roster_;
  std::shared_ptr<Transport> transport_;
  ClientOptions options_;
};

}  // namespace cerberus
