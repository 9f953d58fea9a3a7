#pragma once

// Hashed threshold ElGamal over a fixed-width identity payload.
//
//   x1 = (g^r, id XOR xof("id-mask", encode(pk^r), 32))
//
// Each moderator contributes d_i = c1^{s_i}; any k of them recombine in the
// exponent to pk^r = c1^{sk}, which unmasks c2.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cerberus/group.hpp"
#include "cerberus/shamir.hpp"

namespace cerberus {

inline constexpr std::size_t kIdLen = 32;

/// Fixed-width sender identity.
class Identity {
 public:
  using Array = std::array<std::uint8_t, kIdLen>;

  Identity() = default;
  explicit Identity(const Array& bytes) : bytes_(bytes) {}

  /// Throws InvalidArgument unless exactly kIdLen bytes.
  static Identity from_bytes(ByteView bytes);
  /// xof("identity", account, 32): the digest form used for account names.
  static Identity from_account(std::string_view account);
  /// Length-prefixed and zero-padded short identity (at most 31 bytes).
  static Identity from_short(ByteView raw);

  const Array& bytes() const { return bytes_; }
  std::string hex() const { return to_hex(bytes_); }

  bool operator==(const Identity&) const = default;

 private:
  Array bytes_{};
};

struct IdentityCiphertext {
  GroupElement c1;
  std::array<std::uint8_t, kIdLen> c2;

  /// Wire form encode(c1) || c2. These exact bytes feed the token transcript
  /// and the x2 mask.
  Bytes to_bytes() const;
  /// Rejects wrong sizes, invalid elements and an identity c1.
  static IdentityCiphertext from_bytes(const Suite& suite, ByteView bytes);
  static std::size_t wire_size(const Suite& suite) { return suite.element_size() + kIdLen; }

  bool operator==(const IdentityCiphertext&) const = default;
};

struct DecryptionShare {
  std::uint32_t index;
  GroupElement d;
};

/// Throws InvalidArgument for r == 0 or an identity public key.
IdentityCiphertext encrypt_identity(const GroupElement& pk, const Identity& id, const Scalar& r);

/// True iff encrypt_identity(pk, id, r) == x1. Never throws.
bool verify_encryption(const GroupElement& pk, const Identity& id, const Scalar& r,
                       const IdentityCiphertext& x1) noexcept;

/// d = c1^{share.value}. Throws InvalidArgument for an identity c1.
DecryptionShare decryption_share(const SecretShare& share, const GroupElement& c1);

/// Recombines at least `threshold` shares (all of them are used) and unmasks
/// c2. Throws InvalidArgument on too few shares or duplicate indices.
///
/// There is no proof that each d_i is well formed: a bogus share silently
/// yields a wrong identity.
Identity combine_shares(std::span<const DecryptionShare> shares,
                        std::span<const std::uint8_t, kIdLen> c2, std::uint32_t threshold);

/// Decryption with the whole secret key.
Identity decrypt_with_key(const Scalar& sk, const IdentityCiphertext& x1);

}  // namespace cerberus
