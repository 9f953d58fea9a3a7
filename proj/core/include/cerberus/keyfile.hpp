#pragma once

// On-disk key material produced by the trusted dealer.
//
// Share file (binary, big-endian, one per moderator):
//   "CRBS" | u8 version=1 | u8 suite | u16 k | u16 n | u16 index
//   | scalar encryption_share | scalar signing_share
//   | element encryption_pk | element signing_pk | element verification_share
//
// Roster file (text, one record per line):
//   cerberus-roster 1
//   suite <name>
//   threshold <k> <n>
//   encryption-key <hex>
//   signing-key <hex>
//   moderator <index> <host:port> <hex verification share>   (n lines)

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cerberus/group.hpp"
#include "cerberus/protocol.hpp"
#include "cerberus/schnorr.hpp"
#include "cerberus/shamir.hpp"

namespace cerberus {

struct ModeratorShareFile {
  static constexpr std::uint8_t kVersion = 1;

  const Suite* suite;
  ThresholdParams params;
  std::uint32_t index;
  Scalar encryption_share;
  Scalar signing_share;
  GroupKeys keys;
  GroupElement verification_share;

  SecretShare decryption_key() const { return {index, encryption_share}; }
  SigningKeyShare signing_key() const { return {index, signing_share, keys.signing_pk, verification_share}; }

  Bytes to_bytes() const;
  /// Validates index range and that verification_share == g^signing_share.
  static ModeratorShareFile from_bytes(ByteView bytes);
  void save(const std::filesystem::path& path) const;
  static ModeratorShareFile load(const std::filesystem::path& path);
};

struct RosterEntry {
  std::uint32_t index;
  std::string address;  // host:port
  GroupElement verification_share;
};

/// Everything a client needs to talk to the moderator group.
struct ModeratorRoster {
  static constexpr int kVersion = 1;

  const Suite* suite;
  ThresholdParams params;
  GroupKeys keys;
  std::vector<RosterEntry> moderators;  // sorted, indices 1..n

  /// Verification shares ordered by index (entry i-1 is moderator i).
  std::vector<GroupElement> verification_shares() const;
  const RosterEntry& entry(std::uint32_t index) const;

  std::string to_text() const;
  /// Throws EncodingError on malformed input, unknown version, or indices
  /// that are not exactly 1..n.
  static ModeratorRoster parse(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static ModeratorRoster load(const std::filesystem::path& path);
};

struct DealtKeys {
  Scalar encryption_secret;
  Scalar signing_secret;
  std::vector<ModeratorShareFile> shares;
  ModeratorRoster roster;
};

/// Trusted-dealer key ceremony: independent encryption and signing secrets,
/// each Shamir-shared k-of-n. `addresses` may be empty, in which case
/// moderator i is placed at 127.0.0.1:(base_port + i).
DealtKeys deal_keys(const Suite& suite, ThresholdParams params, Rng& rng,
                    std::span<const std::string> addresses = {}, std::uint16_t base_port = 7100);

/// Writes moderator-<i>.share for each moderator and roster.txt. Refuses to
/// overwrite existing files unless `force`.
void write_keys(const DealtKeys& keys, const std::filesystem::path& out_dir, bool force);

std::filesystem::path share_file_name(const std::filesystem::path& dir, std::uint32_t index);
std::filesystem::path roster_file_name(const std::filesystem::path& dir);

}  // namespace cerberus
