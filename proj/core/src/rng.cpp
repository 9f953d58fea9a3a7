#include "cerberus/rng.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>

namespace cerberus {

namespace detail {

// libsodium must be initialized before its first use; sodium_init is
// idempotent and thread-safe.
void ensure_sodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw EntropyError("libsodium initialization failed");
}

}  // namespace detail

SystemRng::SystemRng() { detail::ensure_sodium(); }

void SystemRng::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  randombytes_buf(out.data(), out.size());
}

SeededRng::SeededRng(std::uint64_t seed) {
  detail::ensure_sodium();
  for (int i = 0; i < 8; ++i) key_[i] = static_cast<std::uint8_t>(seed >> (8 * i));
}

void SeededRng::refill() {
  static constexpr std::array<std::uint8_t, crypto_stream_chacha20_ietf_NONCEBYTES> kNonce{};
  std::array<std::uint8_t, 64> zeros{};
  crypto_stream_chacha20_ietf_xor_ic(block_.data(), zeros.data(), zeros.size(), kNonce.data(),
                                     counter_++, key_.data());
  used_ = 0;
}

void SeededRng::fill(std::span<std::uint8_t> out) {
  std::size_t written = 0;
  while (written < out.size()) {
    if (used_ == block_.size()) refill();
    const std::size_t n = std::min(out.size() - written, block_.size() - used_);
    std::memcpy(out.data() + written, block_.data() + used_, n);
    used_ += n;
    written += n;
  }
}

Rng& system_rng() {
  static SystemRng rng;
  return rng;
}

}  // namespace cerberus
