#include "cerberus/schnorr.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "cerberus/hash.hpp"
#include "cerberus/shamir.hpp"

namespace cerberus {

struct NonceAccess {
  static std::optional<SigningNonces::Secrets> take(SigningNonces& n) {
    auto out = std::move(n.secrets_);
    n.secrets_.reset();
    return out;
  }
};

namespace {

std::vector<NonceCommitment> sorted_roster(std::span<const NonceCommitment> roster) {
  if (roster.empty()) throw InvalidArgument("empty signing roster");
  std::vector<NonceCommitment> sorted(roster.begin(), roster.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const NonceCommitment& a, const NonceCommitment& b) { return a.index < b.index; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].index == sorted[i - 1].index) {
      throw InvalidArgument("duplicate roster index " + std::to_string(sorted[i].index));
    }
  }
  return sorted;
}

std::vector<std::uint32_t> roster_indices(std::span<const NonceCommitment> sorted) {
  std::vector<std::uint32_t> out;
  out.reserve(sorted.size());
  for (const auto& c : sorted) out.push_back(c.index);
  return out;
}

Bytes encode_sorted(std::span<const NonceCommitment> sorted) {
  Bytes out;
  for (const auto& c : sorted) {
    append_u32(out, c.index);
    append(out, c.hiding.encode());
    append(out, c.binding.encode());
  }
  return out;
}

struct RosterContext {
  std::vector<NonceCommitment> sorted;
  std::vector<std::uint32_t> indices;
  std::vector<Scalar> lambdas;
  std::vector<Scalar> rhos;
  GroupElement R;
  Scalar c;
  Bytes roster_bytes;

  std::size_t position(std::uint32_t index) const {
    auto it = std::find(indices.begin(), indices.end(), index);
    if (it == indices.end()) throw InvalidArgument("signer " + std::to_string(index) + " not in roster");
    return static_cast<std::size_t>(it - indices.begin());
  }
};

RosterContext make_context(std::span<const NonceCommitment> roster, ByteView msg,
                           const GroupElement& group_pk) {
  auto sorted = sorted_roster(roster);
  const Suite& suite = group_pk.suite();
  auto indices = roster_indices(sorted);
  auto lambdas = lagrange_at_zero(suite, indices);
  Bytes roster_bytes = encode_sorted(sorted);
  std::vector<Scalar> rhos;
  GroupElement R = suite.identity();
  for (const auto& c : sorted) {
    rhos.push_back(binding_factor(suite, c.index, msg, roster_bytes));
    R *= c.hiding * c.binding.pow(rhos.back());
  }
  Scalar c = challenge(R, group_pk, msg);
  return {std::move(sorted), std::move(indices), std::move(lambdas), std::move(rhos), R, c, std::move(roster_bytes)};
}

// g^z_i == D_i * E_i^rho_i * Y_i^(lambda_i * c)
bool share_matches(const RosterContext& ctx, std::size_t pos, const Scalar& z, const GroupElement& verification_share) {
  const NonceCommitment& own = ctx.sorted[pos];
  const GroupElement expected =
      own.hiding * own.binding.pow(ctx.rhos[pos]) * verification_share.pow(ctx.lambdas[pos] * ctx.c);
  return z.suite().base_pow(z) == expected;
}

}  // namespace

SigningNonces::SigningNonces(std::uint32_t index, Scalar hiding, Scalar binding)
    : secrets_(Secrets{hiding, binding}),
      commitment_{index, hiding.suite().base_pow(hiding), binding.suite().base_pow(binding)} {}

Bytes Signature::to_bytes() const {
  Bytes out = R.encode();
  append(out, z.encode());
  return out;
}

Signature Signature::from_bytes(const Suite& suite, ByteView bytes) {
  if (bytes.size() != wire_size(suite)) throw EncodingError("signature has wrong length");
  ByteReader reader(bytes);
  GroupElement R = suite.decode_element(reader.take(suite.element_size()), IdentityPolicy::kAllow);
  Scalar z = suite.decode_scalar(reader.take(suite.scalar_size()));
  return {R, z};
}

Round1Output round1_commit(const Suite& suite, std::uint32_t index, Rng& rng) {
  SigningNonces nonces(index, suite.random_nonzero_scalar(rng), suite.random_nonzero_scalar(rng));
  NonceCommitment commitment = nonces.commitment();
  return {std::move(nonces), commitment};
}

Bytes encode_roster(std::span<const NonceCommitment> roster) { return encode_sorted(sorted_roster(roster)); }

Scalar binding_factor(const Suite& suite, std::uint32_t index, ByteView msg, ByteView roster_bytes) {
  Bytes input;
  input.reserve(12 + msg.size() + roster_bytes.size());
  append_u32(input, index);
  append_u64(input, msg.size());
  append(input, msg);
  append(input, roster_bytes);
  return hash_to_scalar(suite, tags::kFrostRho, input);
}

GroupElement group_commitment(std::span<const NonceCommitment> roster, ByteView msg) {
  auto sorted = sorted_roster(roster);
  const Suite& suite = sorted.front().hiding.suite();
  const Bytes roster_bytes = encode_sorted(sorted);
  GroupElement R = suite.identity();
  for (const auto& c : sorted) R *= c.hiding * c.binding.pow(binding_factor(suite, c.index, msg, roster_bytes));
  return R;
}

Scalar challenge(const GroupElement& R, const GroupElement& pk, ByteView msg) {
  Bytes input = R.encode();
  append(input, pk.encode());
  append(input, msg);
  return hash_to_scalar(R.suite(), tags::kChallenge, input);
}

SignatureShare round2_sign(const SigningKeyShare& key_share, SigningNonces& nonces, ByteView msg,
                           std::span<const NonceCommitment> roster) {
  // Take the secrets first so that every exit path leaves the nonces spent.
  auto secrets = NonceAccess::take(nonces);
  if (!secrets) throw NonceReuseError("signing nonces already used");
  if (nonces.commitment().index != key_share.index) {
    throw InvalidArgument("nonces belong to a different signer");
  }

  const RosterContext ctx = make_context(roster, msg, key_share.group_pk);
  const std::size_t pos = ctx.position(key_share.index);
  if (!(ctx.sorted[pos] == nonces.commitment())) {
    throw InvalidArgument("roster alters signer " + std::to_string(key_share.index) + "'s commitment");
  }
  return {key_share.index,
          secrets->hiding + secrets->binding * ctx.rhos[pos] + ctx.lambdas[pos] * key_share.value * ctx.c};
}

bool verify_share(std::span<const NonceCommitment> roster, std::uint32_t index,
                  const SignatureShare& share, ByteView msg, const GroupElement& verification_share,
                  const GroupElement& group_pk) noexcept {
  try {
    if (share.index != index) return false;
    const RosterContext ctx = make_context(roster, msg, group_pk);
    return share_matches(ctx, ctx.position(index), share.z, verification_share);
  } catch (const std::exception&) {
    return false;
  }
}

Signature aggregate(std::span<const NonceCommitment> roster, std::span<const SignatureShare> shares,
                    ByteView msg, const GroupElement& group_pk) {
  if (shares.size() != roster.size()) {
    throw InvalidArgument("aggregate: " + std::to_string(shares.size()) + " shares for a roster of " +
                          std::to_string(roster.size()));
  }
  const RosterContext ctx = make_context(roster, msg, group_pk);
  std::unordered_set<std::uint32_t> seen;
  Scalar z = group_pk.suite().zero();
  for (const auto& s : shares) {
    ctx.position(s.index);
    if (!seen.insert(s.index).second) throw InvalidArgument("aggregate: duplicate share index");
    z += s.z;
  }
  return {ctx.R, z};
}

AggregateResult verify_and_aggregate(std::span<const NonceCommitment> roster, std::span<const SignatureShare> shares,
                                     ByteView msg, std::span<const GroupElement> verification_shares,
                                     const GroupElement& group_pk) {
  if (shares.size() != roster.size()) {
    throw InvalidArgument("aggregate: " + std::to_string(shares.size()) + " shares for a roster of " +
                          std::to_string(roster.size()));
  }
  const RosterContext ctx = make_context(roster, msg, group_pk);
  std::unordered_set<std::uint32_t> seen;
  AggregateResult result;
  Scalar z = group_pk.suite().zero();
  for (const auto& s : shares) {
    if (!seen.insert(s.index).second) throw InvalidArgument("aggregate: duplicate share index");
    const auto it = std::find(ctx.indices.begin(), ctx.indices.end(), s.index);
    const bool known = it != ctx.indices.end() && s.index >= 1 && s.index <= verification_shares.size();
    if (!known || !share_matches(ctx, static_cast<std::size_t>(it - ctx.indices.begin()), s.z,
                                 verification_shares[s.index - 1])) {
      result.invalid.push_back(s.index);
      continue;
    }
    z += s.z;
  }
  if (result.invalid.empty()) result.signature = Signature{ctx.R, z};
  return result;
}

Signature sign_single(const Scalar& sk, ByteView msg, Rng& rng) {
  const Suite& suite = sk.suite();
  const Scalar nonce = suite.random_nonzero_scalar(rng);
  const GroupElement R = suite.base_pow(nonce);
  const GroupElement pk = suite.base_pow(sk);
  return {R, nonce + challenge(R, pk, msg) * sk};
}

bool verify(const GroupElement& pk, ByteView msg, const Signature& sig) noexcept {
  try {
    if (pk.is_identity()) return false;
    if (!(pk.suite() == sig.R.suite()) || !(pk.suite() == sig.z.suite())) return false;
    return pk.suite().base_pow(sig.z) == sig.R * pk.pow(challenge(sig.R, pk, msg));
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace cerberus
