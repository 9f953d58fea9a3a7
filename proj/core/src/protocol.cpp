#include "cerberus/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <unordered_set>

#include "cerberus/hash.hpp"

namespace cerberus {

namespace {

constexpr std::uint8_t kEnvelopeVersion = 1;

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

UnixClock system_unix_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

// --- Token / envelope codecs ---------------------------------------------

std::size_t Token::wire_size(const Suite& suite) {
  return IdentityCiphertext::wire_size(suite) + suite.element_size() + 8 + Signature::wire_size(suite);
}

Bytes Token::to_bytes() const {
  Bytes out = x1.to_bytes();
  append(out, pk_eph.encode());
  append_u64(out, issued_at);
  append(out, sig_mod.to_bytes());
  return out;
}

Token Token::from_bytes(const Suite& suite, ByteView bytes) {
  if (bytes.size() != wire_size(suite)) throw EncodingError("token has wrong length");
  ByteReader r(bytes);
  auto x1 = IdentityCiphertext::from_bytes(suite, r.take(IdentityCiphertext::wire_size(suite)));
  auto pk_eph = suite.decode_element(r.take(suite.element_size()));
  const std::uint64_t issued_at = r.u64();
  auto sig = Signature::from_bytes(suite, r.take(Signature::wire_size(suite)));
  return {x1, pk_eph, issued_at, sig};
}

Bytes MessageEnvelope::to_bytes() const {
  Bytes out{kEnvelopeVersion};
  append_u32(out, static_cast<std::uint32_t>(message.size()));
  append(out, message);
  append(out, token.to_bytes());
  append(out, x2);
  append(out, sig_src.to_bytes());
  return out;
}

MessageEnvelope MessageEnvelope::from_bytes(const Suite& suite, ByteView bytes) {
  ByteReader r(bytes);
  if (r.u8() != kEnvelopeVersion) throw EncodingError("unsupported envelope version");
  const std::uint32_t len = r.u32();
  ByteView m = r.take(len);
  Token token = Token::from_bytes(suite, r.take(Token::wire_size(suite)));
  ByteView x2 = r.take(IdentityCiphertext::wire_size(suite));
  Signature sig = Signature::from_bytes(suite, r.take(Signature::wire_size(suite)));
  r.expect_done();
  return {Bytes(m.begin(), m.end()), token, Bytes(x2.begin(), x2.end()), sig};
}

// --- Token issuance -------------------------------------------------------

PendingToken begin_token(const Identity& id_src, const GroupElement& pk_mod, const UnixClock& clock,
                         Rng& rng) {
  const Suite& suite = pk_mod.suite();
  const Scalar r = suite.random_nonzero_scalar(rng);
  const Scalar sk_eph = suite.random_nonzero_scalar(rng);
  const auto now = clock();
  if (now < 0) throw InvalidArgument("clock returned a negative time");
  return begin_token_with(id_src, pk_mod, r, sk_eph, static_cast<std::uint64_t>(now));
}

PendingToken begin_token_with(const Identity& id_src, const GroupElement& pk_mod, const Scalar& r,
                              const Scalar& sk_eph, std::uint64_t issued_at) {
  if (sk_eph.is_zero()) throw InvalidArgument("ephemeral key must be nonzero");
  TokenRequest req{id_src, encrypt_identity(pk_mod, id_src, r), r, pk_mod.suite().base_pow(sk_eph), issued_at};
  return {std::move(req), sk_eph};
}

std::string_view to_string(RequestCheck check) {
  switch (check) {
    case RequestCheck::kAccept:
      return "accept";
    case RequestCheck::kBadEncryption:
      return "bad-encryption";
    case RequestCheck::kStaleTimestamp:
      return "stale-timestamp";
  }
  return "unknown";
}

RequestCheck moderator_check_token_request(const TokenRequest& req, const GroupElement& pk_mod,
                                           std::int64_t now, std::int64_t skew_secs) {
  if (!verify_encryption(pk_mod, req.id_src, req.r, req.x1)) return RequestCheck::kBadEncryption;
  if (req.pk_eph.is_identity()) return RequestCheck::kBadEncryption;
  // issued_at beyond int64 range is stale by definition.
  if (req.issued_at > static_cast<std::uint64_t>(INT64_MAX)) return RequestCheck::kStaleTimestamp;
  const auto issued = static_cast<std::int64_t>(req.issued_at);
  const std::int64_t delta = issued > now ? issued - now : now - issued;
  if (delta > skew_secs) return RequestCheck::kStaleTimestamp;
  return RequestCheck::kAccept;
}

Bytes token_transcript(const IdentityCiphertext& x1, const GroupElement& pk_eph, std::uint64_t issued_at) {
  Bytes out(kTokenTag.begin(), kTokenTag.end());
  append(out, x1.to_bytes());
  append(out, pk_eph.encode());
  append_u64(out, issued_at);
  return out;
}

Token finalize_token(const TokenRequest& req, std::span<const NonceCommitment> roster,
                     std::span<const SignatureShare> shares, const GroupElement& signing_pk,
                     std::span<const GroupElement> verification_shares, std::uint32_t threshold) {
  if (shares.size() < threshold || roster.size() < threshold) {
    throw FinalizeError(FinalizeError::Kind::kInsufficientShares, {},
                        "need " + std::to_string(threshold) + " signature shares, got " +
                            std::to_string(shares.size()));
  }
  const Bytes msg = token_transcript(req.x1, req.pk_eph, req.issued_at);

  AggregateResult agg;
  try {
    agg = verify_and_aggregate(roster, shares, msg, verification_shares, signing_pk);
  } catch (const InvalidArgument& e) {
    throw FinalizeError(FinalizeError::Kind::kBadShare, {}, e.what());
  }
  if (!agg.invalid.empty()) {
    std::string names;
    for (auto i : agg.invalid) names += (names.empty() ? "" : ",") + std::to_string(i);
    throw FinalizeError(FinalizeError::Kind::kBadShare, agg.invalid, "invalid signature share from moderator(s) " + names);
  }
  const Signature sig = *agg.signature;
  if (!verify(signing_pk, msg, sig)) {
    throw FinalizeError(FinalizeError::Kind::kBadShare, {}, "aggregated signature does not verify");
  }
  return {req.x1, req.pk_eph, req.issued_at, sig};
}

// --- Sending --------------------------------------------------------------

bool TokenLedger::try_consume(const Token& token) {
  std::lock_guard lock(mu_);
  return spent_.insert(token.pk_eph.encode()).second;
}

bool TokenLedger::consumed(const Token& token) const {
  std::lock_guard lock(mu_);
  return spent_.count(token.pk_eph.encode()) != 0;
}

Bytes compute_x2(ByteView x1_bytes, ByteView message) {
  Bytes x2 = xof(tags::kX2Mask, message, x1_bytes.size());
  for (std::size_t i = 0; i < x2.size(); ++i) x2[i] ^= x1_bytes[i];
  return x2;
}

MessageEnvelope seal_message(ByteView message, const Token& token, const Scalar& sk_eph,
                             TokenLedger& ledger, Rng& rng) {
  if (!(token.pk_eph.suite().base_pow(sk_eph) == token.pk_eph)) {
    throw InvalidArgument("ephemeral secret key does not match the token");
  }
  if (!ledger.try_consume(token)) throw TokenReuseError("token already used for another message");
  Bytes x2 = compute_x2(token.x1.to_bytes(), message);
  Signature sig_src = sign_single(sk_eph, x2, rng);
  return {Bytes(message.begin(), message.end()), token, std::move(x2), sig_src};
}

std::string_view to_string(EnvelopeCheck check) {
  switch (check) {
    case EnvelopeCheck::kAccept:
      return "accept";
    case EnvelopeCheck::kBadToken:
      return "bad-token";
    case EnvelopeCheck::kX2Mismatch:
      return "x2-mismatch";
    case EnvelopeCheck::kBadSrcSig:
      return "bad-src-sig";
  }
  return "unknown";
}

EnvelopeCheck verify_envelope(const MessageEnvelope& env, const GroupElement& signing_pk) noexcept {
  try {
    const Token& t = env.token;
    if (!verify(signing_pk, token_transcript(t.x1, t.pk_eph, t.issued_at), t.sig_mod)) {
      return EnvelopeCheck::kBadToken;
    }
    if (env.x2 != compute_x2(t.x1.to_bytes(), env.message)) return EnvelopeCheck::kX2Mismatch;
    if (!verify(t.pk_eph, env.x2, env.sig_src)) return EnvelopeCheck::kBadSrcSig;
    return EnvelopeCheck::kAccept;
  } catch (const std::exception&) {
    return EnvelopeCheck::kBadToken;
  }
}

// --- Reporting ------------------------------------------------------------

VotePolicy VotePolicy::parse(std::string_view spec) {
  if (spec == "always-approve") return always_approve();
  if (spec == "always-deny") return always_deny();
  constexpr std::string_view kPrefix = "keyword-list:";
  if (spec.substr(0, kPrefix.size()) == kPrefix) {
    std::vector<std::string> words;
    std::string_view rest = spec.substr(kPrefix.size());
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      std::string_view word = rest.substr(0, comma);
      if (!word.empty()) words.push_back(lowercase(word));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (words.empty()) throw InvalidArgument("keyword-list policy needs at least one keyword");
    return keyword_list(std::move(words));
  }
  throw InvalidArgument("unknown vote policy '" + std::string(spec) + "'");
}

bool VotePolicy::approve(ByteView message, const Token& /*token*/) const {
  switch (kind_) {
    case Kind::kAlwaysApprove:
      return true;
    case Kind::kAlwaysDeny:
      return false;
    case Kind::kKeywordList: {
      const std::string text = lowercase(std::string_view(reinterpret_cast<const char*>(message.data()), message.size()));
      return std::any_of(keywords_.begin(), keywords_.end(), [&](const std::string& w) {
        return text.find(lowercase(w)) != std::string::npos;
      });
    }
  }
  return false;
}

std::string VotePolicy::to_string() const {
  switch (kind_) {
    case Kind::kAlwaysApprove:
      return "always-approve";
    case Kind::kAlwaysDeny:
      return "always-deny";
    case Kind::kKeywordList: {
      std::string out = "keyword-list:";
      for (std::size_t i = 0; i < keywords_.size(); ++i) out += (i ? "," : "") + keywords_[i];
      return out;
    }
  }
  return "unknown";
}

VoteOutcome moderator_vote(const ReportRequest& report, const SecretShare& key_share,
                           const VotePolicy& policy, const GroupElement& signing_pk) {
  const EnvelopeCheck check = verify_envelope(report.envelope, signing_pk);
  if (check != EnvelopeCheck::kAccept) return {VoteOutcome::Kind::kReject, std::nullopt, check};
  if (!policy.approve(report.envelope.message, report.envelope.token)) {
    return {VoteOutcome::Kind::kDeny, std::nullopt, EnvelopeCheck::kAccept};
  }
  return {VoteOutcome::Kind::kShare, decryption_share(key_share, report.envelope.token.x1.c1),
          EnvelopeCheck::kAccept};
}

InsufficientSharesError::InsufficientSharesError(std::size_t have, std::uint32_t need)
    : Error("insufficient decryption shares: have " + std::to_string(have) + ", need " + std::to_string(need)),
      have_(have) {}

Identity recover_identity(const ReportRequest& report, std::span<const DecryptionShare> shares,
                          ThresholdParams params) {
  params.validate();
  std::unordered_set<std::uint32_t> distinct;
  for (const auto& s : shares) distinct.insert(s.index);
  if (distinct.size() < params.k) throw InsufficientSharesError(distinct.size(), params.k);
  if (distinct.size() != shares.size()) throw InvalidArgument("duplicate decryption share index");
  return combine_shares(shares, report.envelope.token.x1.c2, params.k);
}

}  // namespace cerberus
