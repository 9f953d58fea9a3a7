#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cerberus/group.hpp"
#include "cerberus/rng.hpp"

namespace cerberus {

/// k-of-n threshold: any k shares reconstruct, k-1 reveal nothing.
struct ThresholdParams {
  std::uint32_t k = 1;
  std::uint32_t n = 1;

  /// Throws InvalidArgument unless 1 <= k <= n <= 65535.
  void validate() const;
  bool operator==(const ThresholdParams&) const = default;
};

/// f(index) for the dealer's polynomial. Index 0 is the secret and is never
/// dealt.
struct SecretShare {
  std::uint32_t index;
  Scalar value;
};

/// Deals n shares of `secret` on a random degree-(k-1) polynomial.
std::vector<SecretShare> deal(const Scalar& secret, ThresholdParams params, Rng& rng);

/// Deals n shares of the polynomial secret + c1*x + c2*x^2 + ... with the
/// given higher coefficients (k-1 of them).
std::vector<SecretShare> deal_with_coefficients(const Scalar& secret,
                                                std::span<const Scalar> coefficients,
                                                std::uint32_t n);

/// Lagrange coefficients for interpolating at x = 0, aligned with `indices`:
/// lambda_i = prod_{j != i} j / (j - i). Throws InvalidArgument on an empty
/// set, a zero index or a duplicate.
std::vector<Scalar> lagrange_at_zero(const Suite& suite, std::span<const std::uint32_t> indices);

/// Interpolates f(0) over every share given. Throws InvalidArgument on an
/// empty list or duplicate indices.
Scalar reconstruct(std::span<const SecretShare> shares);

}  // namespace cerberus
