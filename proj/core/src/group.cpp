#include "cerberus/group.hpp"

#include <sodium.h>

#include <algorithm>
#include <array>
#include <string>

namespace cerberus {

namespace detail {
void ensure_sodium();
}

namespace {

using Repr = detail::Repr;

class Ristretto255 final : public Suite {
 public:
  Ristretto255() { detail::ensure_sodium(); }

  SuiteId id() const noexcept override { return SuiteId::kRistretto255; }
  std::string_view name() const noexcept override { return "ristretto255"; }
  std::size_t scalar_size() const noexcept override { return 32; }
  std::size_t element_size() const noexcept override { return 32; }
  std::size_t order_bits() const noexcept override { return 253; }

 protected:
  Repr scalar_from_u64(std::uint64_t v) const override {
    Repr r{};
    for (int i = 0; i < 8; ++i) r[i] = static_cast<std::uint8_t>(v >> (8 * i));
    // 2^64 < q, so no reduction is needed.
    return r;
  }

  Repr scalar_reduce_wide_be(ByteView wide) const override {
    std::array<std::uint8_t, 64> le{};
    std::reverse_copy(wide.begin(), wide.end(), le.begin());
    Repr r{};
    crypto_core_ristretto255_scalar_reduce(r.data(), le.data());
    sodium_memzero(le.data(), le.size());
    return r;
  }

  bool scalar_decode_be(ByteView bytes, Repr& out) const override {
    if (bytes.size() != 32) return false;
    std::array<std::uint8_t, 64> wide{};
    std::reverse_copy(bytes.begin(), bytes.end(), wide.begin());
    Repr reduced{};
    crypto_core_ristretto255_scalar_reduce(reduced.data(), wide.data());
    const bool canonical = std::equal(reduced.begin(), reduced.end(), wide.begin());
    sodium_memzero(wide.data(), wide.size());
    if (!canonical) return false;
    out = reduced;
    return true;
  }

  Bytes scalar_encode_be(const Repr& a) const override { return Bytes(a.rbegin(), a.rend()); }

  Repr scalar_add(const Repr& a, const Repr& b) const override {
    Repr r{};
    crypto_core_ristretto255_scalar_add(r.data(), a.data(), b.data());
    return r;
  }
  Repr scalar_sub(const Repr& a, const Repr& b) const override {
    Repr r{};
    crypto_core_ristretto255_scalar_sub(r.data(), a.data(), b.data());
    return r;
  }
  Repr scalar_mul(const Repr& a, const Repr& b) const override {
    Repr r{};
    crypto_core_ristretto255_scalar_mul(r.data(), a.data(), b.data());
    return r;
  }
  Repr scalar_neg(const Repr& a) const override {
    Repr r{};
    crypto_core_ristretto255_scalar_negate(r.data(), a.data());
    return r;
  }
  Repr scalar_inv(const Repr& a) const override {
    Repr r{};
    crypto_core_ristretto255_scalar_invert(r.data(), a.data());
    return r;
  }

  Repr element_identity() const override { return Repr{}; }

  Repr element_generator() const override {
    Repr one = scalar_from_u64(1);
    return element_base_pow(one);
  }

  Repr element_mul(const Repr& a, const Repr& b) const override {
    Repr r{};
    crypto_core_ristretto255_add(r.data(), a.data(), b.data());
    return r;
  }

  // libsodium reports an identity result with -1 but still writes the
  // all-zero encoding, which is exactly our identity representation.
  Repr element_pow(const Repr& base, const Repr& exponent) const override {
    Repr r{};
    [[maybe_unused]] const int rc = crypto_scalarmult_ristretto255(r.data(), exponent.data(), base.data());
    return r;
  }
  Repr element_base_pow(const Repr& exponent) const override {
    Repr r{};
    [[maybe_unused]] const int rc = crypto_scalarmult_ristretto255_base(r.data(), exponent.data());
    return r;
  }

  bool element_decode(ByteView bytes, Repr& out) const override {
    if (bytes.size() != 32) return false;
    if (crypto_core_ristretto255_is_valid_point(bytes.data()) != 1) return false;
    std::copy(bytes.begin(), bytes.end(), out.begin());
    return true;
  }

  Bytes element_encode(const Repr& a) const override { return Bytes(a.begin(), a.end()); }
};

constexpr std::uint32_t powmod(std::uint32_t base, std::uint32_t exp, std::uint32_t m) {
  std::uint32_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = result * base % m;
    base = base * base % m;
    exp >>= 1U;
  }
  return result;
}

// Order-11 subgroup of (Z/23Z)*. Exponents live in Z/11Z.
class Toy23 final : public Suite {
 public:
  static constexpr std::uint32_t kModulus = 23;
  static constexpr std::uint32_t kOrder = 11;
  static constexpr std::uint32_t kGenerator = 2;

  static_assert(powmod(kGenerator, kOrder, kModulus) == 1 && kGenerator % kModulus != 1,
                "toy generator must have prime order 11");

  SuiteId id() const noexcept override { return SuiteId::kToy23; }
  std::string_view name() const noexcept override { return "toy23"; }
  std::size_t scalar_size() const noexcept override { return 1; }
  std::size_t element_size() const noexcept override { return 1; }
  std::size_t order_bits() const noexcept override { return 4; }

 protected:
  static Repr small(std::uint32_t v) {
    Repr r{};
    r[0] = static_cast<std::uint8_t>(v);
    return r;
  }

  Repr scalar_from_u64(std::uint64_t v) const override { return small(static_cast<std::uint32_t>(v % kOrder)); }

  Repr scalar_reduce_wide_be(ByteView wide) const override {
    std::uint32_t acc = 0;
    for (std::uint8_t b : wide) acc = (acc * 256 + b) % kOrder;
    return small(acc);
  }

  bool scalar_decode_be(ByteView bytes, Repr& out) const override {
    if (bytes.size() != 1 || bytes[0] >= kOrder) return false;
    out = small(bytes[0]);
    return true;
  }

  Bytes scalar_encode_be(const Repr& a) const override { return Bytes{a[0]}; }

  Repr scalar_add(const Repr& a, const Repr& b) const override { return small((a[0] + b[0]) % kOrder); }
  Repr scalar_sub(const Repr& a, const Repr& b) const override {
    return small((a[0] + kOrder - b[0]) % kOrder);
  }
  Repr scalar_mul(const Repr& a, const Repr& b) const override { return small(a[0] * b[0] % kOrder); }
  Repr scalar_neg(const Repr& a) const override { return small((kOrder - a[0]) % kOrder); }
  Repr scalar_inv(const Repr& a) const override { return small(powmod(a[0], kOrder - 2, kOrder)); }

  Repr element_identity() const override { return small(1); }
  Repr element_generator() const override { return small(kGenerator); }
  Repr element_mul(const Repr& a, const Repr& b) const override { return small(a[0] * b[0] % kModulus); }
  Repr element_pow(const Repr& base, const Repr& exponent) const override {
    return small(powmod(base[0], exponent[0], kModulus));
  }
  Repr element_base_pow(const Repr& exponent) const override {
    return small(powmod(kGenerator, exponent[0], kModulus));
  }

  bool element_decode(ByteView bytes, Repr& out) const override {
    if (bytes.size() != 1) return false;
    const std::uint32_t v = bytes[0];
    if (v == 0 || v >= kModulus) return false;
    if (powmod(v, kOrder, kModulus) != 1) return false;  // outside the order-11 subgroup
    out = small(v);
    return true;
  }

  Bytes element_encode(const Repr& a) const override { return Bytes{a[0]}; }
};

}  // namespace

// --- Scalar ---------------------------------------------------------------

Scalar Scalar::operator+(const Scalar& rhs) const {
  suite_->check_same(*rhs.suite_);
  return suite_->make_scalar(suite_->scalar_add(repr_, rhs.repr_));
}

Scalar Scalar::operator-(const Scalar& rhs) const {
  suite_->check_same(*rhs.suite_);
  return suite_->make_scalar(suite_->scalar_sub(repr_, rhs.repr_));
}

Scalar Scalar::operator*(const Scalar& rhs) const {
  suite_->check_same(*rhs.suite_);
  return suite_->make_scalar(suite_->scalar_mul(repr_, rhs.repr_));
}

Scalar Scalar::operator-() const { return suite_->make_scalar(suite_->scalar_neg(repr_)); }

Scalar Scalar::inverse() const {
  if (is_zero()) throw InvalidArgument("inverse of zero scalar");
  return suite_->make_scalar(suite_->scalar_inv(repr_));
}

bool Scalar::is_zero() const {
  return std::all_of(repr_.begin(), repr_.end(), [](std::uint8_t b) { return b == 0; });
}

Bytes Scalar::encode() const { return suite_->scalar_encode_be(repr_); }

bool Scalar::operator==(const Scalar& rhs) const { return suite_ == rhs.suite_ && repr_ == rhs.repr_; }

// --- GroupElement ---------------------------------------------------------

GroupElement GroupElement::operator*(const GroupElement& rhs) const {
  suite_->check_same(*rhs.suite_);
  return suite_->make_element(suite_->element_mul(repr_, rhs.repr_));
}

GroupElement GroupElement::pow(const Scalar& exponent) const {
  suite_->check_same(exponent.suite());
  return suite_->make_element(suite_->element_pow(repr_, exponent.repr_));
}

bool GroupElement::is_identity() const { return repr_ == suite_->element_identity(); }

Bytes GroupElement::encode() const { return suite_->element_encode(repr_); }

bool GroupElement::operator==(const GroupElement& rhs) const {
  return suite_ == rhs.suite_ && repr_ == rhs.repr_;
}

// --- Suite ----------------------------------------------------------------

const Suite& Suite::ristretto255() {
  static const Ristretto255 suite;
  return suite;
}

const Suite& Suite::toy23() {
  static const Toy23 suite;
  return suite;
}

const Suite& Suite::get(SuiteId id) {
  switch (id) {
    case SuiteId::kRistretto255:
      return ristretto255();
    case SuiteId::kToy23:
      return toy23();
  }
  throw InvalidArgument("unknown suite id " + std::to_string(static_cast<int>(id)));
}

const Suite& Suite::by_name(std::string_view name) {
  if (name == "ristretto255") return ristretto255();
  if (name == "toy23") return toy23();
  throw InvalidArgument("unknown suite '" + std::string(name) + "'");
}

void Suite::check_same(const Suite& other) const {
  if (this != &other) throw InvalidArgument("mixed group suites");
}

Scalar Suite::from_u64(std::uint64_t value) const { return make_scalar(scalar_from_u64(value)); }

Scalar Suite::reduce_wide(ByteView wide) const {
  if (wide.size() != 64) throw InvalidArgument("wide reduction needs exactly 64 bytes");
  return make_scalar(scalar_reduce_wide_be(wide));
}

Scalar Suite::random_scalar(Rng& rng) const {
  std::array<std::uint8_t, 64> wide{};
  rng.fill(wide);
  Scalar s = reduce_wide(wide);
  sodium_memzero(wide.data(), wide.size());
  return s;
}

Scalar Suite::random_nonzero_scalar(Rng& rng) const {
  for (;;) {
    Scalar s = random_scalar(rng);
    if (!s.is_zero()) return s;
  }
}

Scalar Suite::decode_scalar(ByteView bytes) const {
  Repr r{};
  if (!scalar_decode_be(bytes, r)) throw EncodingError(std::string(name()) + ": non-canonical scalar");
  return make_scalar(r);
}

GroupElement Suite::identity() const { return make_element(element_identity()); }

GroupElement Suite::generator() const { return make_element(element_generator()); }

GroupElement Suite::base_pow(const Scalar& exponent) const {
  check_same(exponent.suite());
  return make_element(element_base_pow(exponent.repr_));
}

GroupElement Suite::decode_element(ByteView bytes, IdentityPolicy identity) const {
  Repr r{};
  if (!element_decode(bytes, r)) throw EncodingError(std::string(name()) + ": invalid group element");
  GroupElement e = make_element(r);
  if (identity == IdentityPolicy::kReject && e.is_identity()) {
    throw EncodingError(std::string(name()) + ": identity element not allowed here");
  }
  return e;
}

}  // namespace cerberus
