#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cerberus {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A byte string failed to parse as the expected canonical form.
class EncodingError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition (bad parameters, wrong sizes).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

std::string to_hex(ByteView bytes);
/// Accepts lowercase or uppercase hex; throws EncodingError on odd length or
/// non-hex characters.
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline Bytes bytes_of(std::string_view s) { return Bytes(s.begin(), s.end()); }

void append(Bytes& out, ByteView data);
void append_u16(Bytes& out, std::uint16_t v);
void append_u32(Bytes& out, std::uint32_t v);
void append_u64(Bytes& out, std::uint64_t v);

/// Sequential big-endian reader over a byte view. Every read throws
/// EncodingError on truncation.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  ByteView take(std::size_t n);
  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return remaining() == 0; }
  /// Throws EncodingError if unread bytes remain.
  void expect_done() const;

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace cerberus
