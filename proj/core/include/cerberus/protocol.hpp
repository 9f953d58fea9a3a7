#pragma once

// Transport-agnostic token issuance, message sealing, envelope checks,
// moderator voting and identity recovery.
//
// Token issuance:  client begin_token -> each moderator checks the request
//                  and co-signs the token transcript -> client finalize_token.
// Sending:         seal_message binds x1 to the message through
//                  x2 = x1 XOR xof("x2-mask", m) signed under the ephemeral key.
// Reporting:       each moderator votes with a decryption share; any k
//                  shares recover the sender identity.

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cerberus/elgamal.hpp"
#include "cerberus/group.hpp"
#include "cerberus/rng.hpp"
#include "cerberus/schnorr.hpp"
#include "cerberus/shamir.hpp"

namespace cerberus {

/// Wall-clock source returning unix seconds.
using UnixClock = std::function<std::int64_t()>;
UnixClock system_unix_clock();

inline constexpr std::int64_t kDefaultSkewSecs = 300;

/// Public keys shared by all moderators. Encryption and signing keys are
/// independent secrets.
struct GroupKeys {
  GroupElement encryption_pk;
  GroupElement signing_pk;
};

struct Token {
  IdentityCiphertext x1;
  GroupElement pk_eph;
  std::uint64_t issued_at;
  Signature sig_mod;

  Bytes to_bytes() const;
  static Token from_bytes(const Suite& suite, ByteView bytes);
  static std::size_t wire_size(const Suite& suite);

  bool operator==(const Token&) const = default;
};

struct MessageEnvelope {
  Bytes message;
  Token token;
  Bytes x2;
  Signature sig_src;

  /// u8(version) || u32(|m|) || m || token || x2 || sig_src.
  Bytes to_bytes() const;
  static MessageEnvelope from_bytes(const Suite& suite, ByteView bytes);

  bool operator==(const MessageEnvelope&) const = default;
};

/// Sent to every moderator in round 1. Discloses r so the moderator can
/// re-derive x1.
struct TokenRequest {
  Identity id_src;
  IdentityCiphertext x1;
  Scalar r;
  GroupElement pk_eph;
  std::uint64_t issued_at;
};

struct ReportRequest {
  MessageEnvelope envelope;
};

/// Client-side state for one token under construction. sk_eph never leaves
/// the client.
struct PendingToken {
  TokenRequest request;
  Scalar sk_eph;
};

PendingToken begin_token(const Identity& id_src, const GroupElement& pk_mod, const UnixClock& clock,
                         Rng& rng);
/// Deterministic variant with caller-chosen randomness.
PendingToken begin_token_with(const Identity& id_src, const GroupElement& pk_mod, const Scalar& r,
                              const Scalar& sk_eph, std::uint64_t issued_at);

enum class RequestCheck { kAccept, kBadEncryption, kStaleTimestamp };
std::string_view to_string(RequestCheck check);

RequestCheck moderator_check_token_request(const TokenRequest& req, const GroupElement& pk_mod,
                                           std::int64_t now, std::int64_t skew_secs = kDefaultSkewSecs);

inline constexpr std::string_view kTokenTag = "token";

/// "token" || x1 bytes || encode(pk_eph) || u64(issued_at). The message
/// signed by the moderators.
Bytes token_transcript(const IdentityCiphertext& x1, const GroupElement& pk_eph, std::uint64_t issued_at);

/// Token finalization failed. `indices` names the moderators whose shares
/// were rejected (empty for a plain shortage).
class FinalizeError : public Error {
 public:
  enum class Kind { kInsufficientShares, kBadShare };
  FinalizeError(Kind kind, std::vector<std::uint32_t> indices, const std::string& what)
      : Error(what), kind_(kind), indices_(std::move(indices)) {}
  Kind kind() const { return kind_; }
  const std::vector<std::uint32_t>& indices() const { return indices_; }

 private:
  Kind kind_;
  std::vector<std::uint32_t> indices_;
};

/// Verifies each share against its moderator's verification share, then
/// aggregates. `verification_shares[i - 1]` belongs to moderator i.
Token finalize_token(const TokenRequest& req, std::span<const NonceCommitment> roster,
                     std::span<const SignatureShare> shares, const GroupElement& signing_pk,
                     std::span<const GroupElement> verification_shares, std::uint32_t threshold);

/// Client-side record of spent ephemeral keys. Thread-safe.
class TokenLedger {
 public:
  /// False if the token was already consumed.
  bool try_consume(const Token& token);
  bool consumed(const Token& token) const;

 private:
  mutable std::mutex mu_;
  std::set<Bytes> spent_;
};

class TokenReuseError : public Error {
 public:
  using Error::Error;
};

/// x1 bytes XOR xof("x2-mask", message, |x1 bytes|).
Bytes compute_x2(ByteView x1_bytes, ByteView message);

/// Throws TokenReuseError when the ledger has seen this token, and
/// InvalidArgument when sk_eph does not match token.pk_eph.
MessageEnvelope seal_message(ByteView message, const Token& token, const Scalar& sk_eph,
                             TokenLedger& ledger, Rng& rng);

enum class EnvelopeCheck { kAccept, kBadToken, kX2Mismatch, kBadSrcSig };
std::string_view to_string(EnvelopeCheck check);

EnvelopeCheck verify_envelope(const MessageEnvelope& env, const GroupElement& signing_pk) noexcept;

/// A moderator's local judgment on whether a reported message warrants
/// revealing its sender. Deterministic for a fixed configuration.
class VotePolicy {
 public:
  enum class Kind { kAlwaysApprove, kAlwaysDeny, kKeywordList };

  static VotePolicy always_approve() { return VotePolicy(Kind::kAlwaysApprove, {}); }
  static VotePolicy always_deny() { return VotePolicy(Kind::kAlwaysDeny, {}); }
  static VotePolicy keyword_list(std::vector<std::string> keywords) {
    return VotePolicy(Kind::kKeywordList, std::move(keywords));
  }
  /// "always-approve", "always-deny" or "keyword-list:w1,w2,...".
  static VotePolicy parse(std::string_view spec);

  /// Keyword lists approve when the message contains any keyword
  /// (case-insensitive substring).
  bool approve(ByteView message, const Token& token) const;
  std::string to_string() const;
  Kind kind() const { return kind_; }

 private:
  VotePolicy(Kind kind, std::vector<std::string> keywords) : kind_(kind), keywords_(std::move(keywords)) {}

  Kind kind_;
  std::vector<std::string> keywords_;
};

struct VoteOutcome {
  enum class Kind { kShare, kDeny, kReject };
  Kind kind;
  std::optional<DecryptionShare> share;  // set iff kind == kShare
  EnvelopeCheck reason = EnvelopeCheck::kAccept;  // set when kind == kReject
};

/// Invalid envelopes are rejected before the policy is consulted.
VoteOutcome moderator_vote(const ReportRequest& report, const SecretShare& key_share,
                           const VotePolicy& policy, const GroupElement& signing_pk);

class InsufficientSharesError : public Error {
 public:
  InsufficientSharesError(std::size_t have, std::uint32_t need);
  std::size_t have() const { return have_; }

 private:
  std::size_t have_;
};

Identity recover_identity(const ReportRequest& report, std::span<const DecryptionShare> shares,
                          ThresholdParams params);

}  // namespace cerberus
