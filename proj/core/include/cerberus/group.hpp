#pragma once

// Prime-order group and scalar field used by every protocol layer.
//
// Two suites are provided:
//   * ristretto255: the production group (libsodium backend), |q| = 253 bits.
//   * toy23: the order-11 subgroup of (Z/23Z)* generated by 2. Small enough
//     that tests can brute-force discrete logarithms.
//
// Group notation is multiplicative throughout: `a * b` is the group
// operation and `x.pow(s)` is exponentiation by a scalar.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "cerberus/bytes.hpp"
#include "cerberus/rng.hpp"

namespace cerberus {

enum class SuiteId : std::uint8_t {
  kRistretto255 = 1,
  kToy23 = 2,
};

class Suite;

namespace detail {
using Repr = std::array<std::uint8_t, 32>;
}

/// Residue modulo the group order q.
class Scalar {
 public:
  const Suite& suite() const { return *suite_; }

  Scalar operator+(const Scalar& rhs) const;
  Scalar operator-(const Scalar& rhs) const;
  Scalar operator*(const Scalar& rhs) const;
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& rhs) { return *this = *this + rhs; }
  Scalar& operator*=(const Scalar& rhs) { return *this = *this * rhs; }

  /// Multiplicative inverse. Throws InvalidArgument for zero.
  Scalar inverse() const;
  bool is_zero() const;

  /// Fixed-width big-endian encoding, zero padded.
  Bytes encode() const;

  bool operator==(const Scalar& rhs) const;

 private:
  friend class Suite;
  friend class GroupElement;
  Scalar(const Suite* suite, const detail::Repr& repr) : suite_(suite), repr_(repr) {}

  const Suite* suite_;
  detail::Repr repr_;  // backend-specific (little-endian for both suites)
};

/// Element of the prime-order group.
class GroupElement {
 public:
  const Suite& suite() const { return *suite_; }

  /// Group operation.
  GroupElement operator*(const GroupElement& rhs) const;
  GroupElement& operator*=(const GroupElement& rhs) { return *this = *this * rhs; }
  GroupElement pow(const Scalar& exponent) const;

  bool is_identity() const;

  /// Fixed-width canonical encoding.
  Bytes encode() const;

  bool operator==(const GroupElement& rhs) const;

 private:
  friend class Suite;
  GroupElement(const Suite* suite, const detail::Repr& repr) : suite_(suite), repr_(repr) {}

  const Suite* suite_;
  detail::Repr repr_;
};

enum class IdentityPolicy { kReject, kAllow };

/// A named group suite: (G, q, g) plus canonical encodings.
class Suite {
 public:
  virtual ~Suite() = default;

  static const Suite& ristretto255();
  static const Suite& toy23();
  /// Throws InvalidArgument for unknown ids.
  static const Suite& get(SuiteId id);
  /// Accepts "ristretto255" or "toy23".
  static const Suite& by_name(std::string_view name);

  virtual SuiteId id() const noexcept = 0;
  virtual std::string_view name() const noexcept = 0;
  virtual std::size_t scalar_size() const noexcept = 0;
  virtual std::size_t element_size() const noexcept = 0;
  /// Bit length of q.
  virtual std::size_t order_bits() const noexcept = 0;

  Scalar zero() const { return from_u64(0); }
  Scalar one() const { return from_u64(1); }
  /// `value` reduced mod q.
  Scalar from_u64(std::uint64_t value) const;
  /// Interprets exactly 64 bytes as a big-endian integer and reduces mod q.
  Scalar reduce_wide(ByteView wide) const;
  /// Uniform scalar in [0, q-1] from 64 bytes of entropy.
  Scalar random_scalar(Rng& rng) const;
  /// Uniform scalar in [1, q-1].
  Scalar random_nonzero_scalar(Rng& rng) const;
  /// Strict: rejects wrong length and values >= q.
  Scalar decode_scalar(ByteView bytes) const;

  GroupElement identity() const;
  GroupElement generator() const;
  /// generator().pow(exponent), using a fixed-base path where available.
  GroupElement base_pow(const Scalar& exponent) const;
  /// Strict: rejects wrong length, non-canonical encodings, points outside
  /// the prime-order group, and (by default) the identity.
  GroupElement decode_element(ByteView bytes,
                              IdentityPolicy identity = IdentityPolicy::kReject) const;

  bool operator==(const Suite& rhs) const { return this == &rhs; }

 protected:
  using Repr = detail::Repr;

  virtual Repr scalar_from_u64(std::uint64_t v) const = 0;
  virtual Repr scalar_reduce_wide_be(ByteView wide64) const = 0;
  virtual bool scalar_decode_be(ByteView bytes, Repr& out) const = 0;
  virtual Bytes scalar_encode_be(const Repr& a) const = 0;
  virtual Repr scalar_add(const Repr& a, const Repr& b) const = 0;
  virtual Repr scalar_sub(const Repr& a, const Repr& b) const = 0;
  virtual Repr scalar_mul(const Repr& a, const Repr& b) const = 0;
  virtual Repr scalar_neg(const Repr& a) const = 0;
  virtual Repr scalar_inv(const Repr& a) const = 0;

  virtual Repr element_identity() const = 0;
  virtual Repr element_generator() const = 0;
  virtual Repr element_mul(const Repr& a, const Repr& b) const = 0;
  virtual Repr element_pow(const Repr& base, const Repr& exponent) const = 0;
  virtual Repr element_base_pow(const Repr& exponent) const = 0;
  virtual bool element_decode(ByteView bytes, Repr& out) const = 0;
  virtual Bytes element_encode(const Repr& a) const = 0;

 private:
  friend class Scalar;
  friend class GroupElement;

  Scalar make_scalar(const Repr& r) const { return Scalar(this, r); }
  GroupElement make_element(const Repr& r) const { return GroupElement(this, r); }
  void check_same(const Suite& other) const;
};

}  // namespace cerberus
