#pragma once

#include <cstddef>
#include <string_view>

#include "cerberus/bytes.hpp"
#include "cerberus/group.hpp"

namespace cerberus {

/// Domain tags used by the protocol. Each hash role gets its own stream.
namespace tags {
inline constexpr std::string_view kIdMask = "id-mask";
inline constexpr std::string_view kX2Mask = "x2-mask";
inline constexpr std::string_view kIdentity = "identity";
inline constexpr std::string_view kFrostRho = "frost-rho";
inline constexpr std::string_view kChallenge = "schnorr-challenge";
}  // namespace tags

/// SHAKE256(u8(|tag|) || tag || input), truncated to `out_len` bytes.
///
/// A shorter output is always a prefix of a longer one for the same
/// (tag, input). Throws InvalidArgument for out_len == 0 or |tag| > 255.
Bytes xof(std::string_view domain_tag, ByteView input, std::size_t out_len);

/// 64 bytes of xof output, read big-endian and reduced mod q.
Scalar hash_to_scalar(const Suite& suite, std::string_view domain_tag, ByteView input);

}  // namespace cerberus
