#pragma once

// Two-round FROST threshold Schnorr signing plus single-signer Schnorr.
// Both produce the same (R, z) signature and share one verifier:
//
//   c = H("schnorr-challenge", encode(R) || encode(pk) || msg)
//   accept iff g^z == R * pk^c

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cerberus/group.hpp"
#include "cerberus/rng.hpp"

namespace cerberus {

/// round2_sign was called with a nonce pair that was already used.
class NonceReuseError : public Error {
 public:
  using Error::Error;
};

struct SigningKeyShare {
  std::uint32_t index;
  Scalar value;
  GroupElement group_pk;
  GroupElement verification_share;  // g^value
};

/// Round-1 public commitment (D, E) = (g^d, g^e).
struct NonceCommitment {
  std::uint32_t index;
  GroupElement hiding;
  GroupElement binding;

  bool operator==(const NonceCommitment&) const = default;
};

/// Secret round-1 nonces. Move-only and usable for exactly one round2_sign
/// call; the scalars are dropped whether or not signing succeeds.
class SigningNonces {
 public:
  SigningNonces(std::uint32_t index, Scalar hiding, Scalar binding);
  SigningNonces(SigningNonces&&) noexcept = default;
  SigningNonces& operator=(SigningNonces&&) noexcept = default;
  SigningNonces(const SigningNonces&) = delete;
  SigningNonces& operator=(const SigningNonces&) = delete;

  const NonceCommitment& commitment() const { return commitment_; }
  bool consumed() const { return !secrets_.has_value(); }

 private:
  friend struct NonceAccess;
  struct Secrets {
    Scalar hiding;
    Scalar binding;
  };
  std::optional<Secrets> secrets_;
  NonceCommitment commitment_;
};

struct Round1Output {
  SigningNonces nonces;
  NonceCommitment commitment;
};

struct SignatureShare {
  std::uint32_t index;
  Scalar z;
};

struct Signature {
  GroupElement R;
  Scalar z;

  /// encode(R) || encode(z).
  Bytes to_bytes() const;
  /// Strict: rejects non-canonical R or z.
  static Signature from_bytes(const Suite& suite, ByteView bytes);
  static std::size_t wire_size(const Suite& suite) { return suite.element_size() + suite.scalar_size(); }

  bool operator==(const Signature&) const = default;
};

Round1Output round1_commit(const Suite& suite, std::uint32_t index, Rng& rng);

/// Canonical roster bytes: commitments sorted by index, each
/// u32(index) || encode(D) || encode(E). Throws InvalidArgument on an empty
/// roster or duplicate indices.
Bytes encode_roster(std::span<const NonceCommitment> roster);

/// rho_i = H("frost-rho", u32(i) || u64(|msg|) || msg || roster).
Scalar binding_factor(const Suite& suite, std::uint32_t index, ByteView msg, ByteView roster_bytes);

/// R = prod_j D_j * E_j^{rho_j}.
GroupElement group_commitment(std::span<const NonceCommitment> roster, ByteView msg);

Scalar challenge(const GroupElement& R, const GroupElement& pk, ByteView msg);

/// z_i = d + e*rho_i + lambda_i*s_i*c. Consumes `nonces` unconditionally.
/// Throws NonceReuseError if already consumed; InvalidArgument if the signer
/// is missing from the roster or its roster entry differs from its own
/// commitment.
SignatureShare round2_sign(const SigningKeyShare& key_share, SigningNonces& nonces, ByteView msg,
                           std::span<const NonceCommitment> roster);

/// g^{z_i} == D_i * E_i^{rho_i} * Y_i^{lambda_i * c}. Never throws.
bool verify_share(std::span<const NonceCommitment> roster, std::uint32_t index,
                  const SignatureShare& share, ByteView msg, const GroupElement& verification_share,
                  const GroupElement& group_pk) noexcept;

/// (R, sum z_i). Each roster member must contribute exactly one share.
Signature aggregate(std::span<const NonceCommitment> roster, std::span<const SignatureShare> shares,
                    ByteView msg, const GroupElement& group_pk);

struct AggregateResult {
  std::optional<Signature> signature;  // set iff every share verified
  std::vector<std::uint32_t> invalid;  // indices of shares that failed verify_share
};

/// verify_share for every share followed by aggregate, sharing one pass over
/// the roster. `verification_shares[i - 1]` belongs to signer i. Throws
/// InvalidArgument on a count mismatch or duplicate share indices.
AggregateResult verify_and_aggregate(std::span<const NonceCommitment> roster, std::span<const SignatureShare> shares,
                                     ByteView msg, std::span<const GroupElement> verification_shares,
                                     const GroupElement& group_pk);

Signature sign_single(const Scalar& sk, ByteView msg, Rng& rng);

/// Standard Schnorr verification, shared by threshold and single-signer
/// signatures. Rejects an identity pk. Never throws.
bool verify(const GroupElement& pk, ByteView msg, const Signature& sig) noexcept;

}  // namespace cerberus
