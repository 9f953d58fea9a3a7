#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "cerberus/bytes.hpp"

namespace cerberus {

/// The entropy source could not deliver the requested bytes.
class EntropyError : public Error {
 public:
  using Error::Error;
};

/// Source of random bytes. Passed explicitly to every randomized operation.
class Rng {
 public:
  virtual ~Rng() = default;
  /// Fills `out` completely or throws EntropyError. Never returns partial or
  /// fixed output.
  virtual void fill(std::span<std::uint8_t> out) = 0;
};

/// Operating-system CSPRNG. Safe for concurrent use.
class SystemRng final : public Rng {
 public:
  SystemRng();
  void fill(std::span<std::uint8_t> out) override;
};

/// Deterministic ChaCha20 stream keyed from a seed. Reproducible across
/// processes and platforms; for tests and benchmarks only. Not thread-safe.
class SeededRng final : public Rng {
 public:
  explicit SeededRng(std::uint64_t seed);
  void fill(std::span<std::uint8_t> out) override;

 private:
  void refill();

  std::array<std::uint8_t, 32> key_{};
  std::array<std::uint8_t, 64> block_{};
  std::size_t used_ = 64;
  std::uint32_t counter_ = 0;
};

/// Process-wide SystemRng instance.
Rng& system_rng();

}  // namespace cerberus
