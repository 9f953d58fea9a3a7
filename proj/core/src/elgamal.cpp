#include "cerberus/elgamal.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "cerberus/hash.hpp"

namespace cerberus {

namespace {

using Pad = std::array<std::uint8_t, kIdLen>;

Pad mask_for(const GroupElement& shared) {
  const Bytes mask = xof(tags::kIdMask, shared.encode(), kIdLen);
  Pad out{};
  std::copy(mask.begin(), mask.end(), out.begin());
  return out;
}

Pad xor_pad(std::span<const std::uint8_t, kIdLen> a, const Pad& b) {
  Pad out{};
  for (std::size_t i = 0; i < kIdLen; ++i) out[i] = a[i] ^ b[i];
  return out;
}

}  // namespace

Identity Identity::from_bytes(ByteView bytes) {
  if (bytes.size() != kIdLen) throw InvalidArgument("identity must be exactly 32 bytes");
  Array a{};
  std::copy(bytes.begin(), bytes.end(), a.begin());
  return Identity(a);
}

Identity Identity::from_account(std::string_view account) {
  return from_bytes(xof(tags::kIdentity, as_bytes(account), kIdLen));
}

Identity Identity::from_short(ByteView raw) {
  if (raw.size() >= kIdLen) throw InvalidArgument("short identity must be at most 31 bytes");
  Array a{};
  a[0] = static_cast<std::uint8_t>(raw.size());
  std::copy(raw.begin(), raw.end(), a.begin() + 1);
  return Identity(a);
}

Bytes IdentityCiphertext::to_bytes() const {
  Bytes out = c1.encode();
  out.insert(out.end(), c2.begin(), c2.end());
  return out;
}

IdentityCiphertext IdentityCiphertext::from_bytes(const Suite& suite, ByteView bytes) {
  if (bytes.size() != wire_size(suite)) throw EncodingError("identity ciphertext has wrong length");
  ByteReader reader(bytes);
  IdentityCiphertext x1{suite.decode_element(reader.take(suite.element_size())), {}};
  ByteView c2 = reader.take(kIdLen);
  std::copy(c2.begin(), c2.end(), x1.c2.begin());
  return x1;
}

IdentityCiphertext encrypt_identity(const GroupElement& pk, const Identity& id, const Scalar& r) {
  if (r.is_zero()) throw InvalidArgument("encryption randomness must be nonzero");
  if (pk.is_identity()) throw InvalidArgument("encryption key is the identity element");
  const Suite& suite = pk.suite();
  return {suite.base_pow(r), xor_pad(id.bytes(), mask_for(pk.pow(r)))};
}

bool verify_encryption(const GroupElement& pk, const Identity& id, const Scalar& r,
                       const IdentityCiphertext& x1) noexcept {
  try {
    return encrypt_identity(pk, id, r) == x1;
  } catch (const std::exception&) {
    return false;
  }
}

DecryptionShare decryption_share(const SecretShare& share, const GroupElement& c1) {
  if (c1.is_identity()) throw InvalidArgument("c1 is the identity element");
  return {share.index, c1.pow(share.value)};
}

Identity combine_shares(std::span<const DecryptionShare> shares,
                        std::span<const std::uint8_t, kIdLen> c2, std::uint32_t threshold) {
  if (threshold == 0) throw InvalidArgument("threshold must be positive");
  if (shares.size() < threshold) {
    throw InvalidArgument("need " + std::to_string(threshold) + " decryption shares, got " +
                          std::to_string(shares.size()));
  }
  const Suite& suite = shares.front().d.suite();
  std::vector<std::uint32_t> indices;
  indices.reserve(shares.size());
  for (const auto& s : shares) indices.push_back(s.index);
  const auto lambdas = lagrange_at_zero(suite, indices);

  GroupElement shared = suite.identity();
  for (std::size_t i = 0; i < shares.size(); ++i) shared *= shares[i].d.pow(lambdas[i]);
  return Identity(xor_pad(c2, mask_for(shared)));
}

Identity decrypt_with_key(const Scalar& sk, const IdentityCiphertext& x1) {
  return Identity(xor_pad(x1.c2, mask_for(x1.c1.pow(sk))));
}

}  // namespace cerberus
