#include "cerberus/keyfile.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace cerberus {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("cerberus-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

TEST(ShareFile, BinaryRoundTrip) {
  SeededRng rng(50);
  for (const Suite* suite : {&Suite::ristretto255(), &Suite::toy23()}) {
    const auto keys = deal_keys(*suite, {2, 3}, rng);
    for (const auto& share : keys.shares) {
      const auto back = ModeratorShareFile::from_bytes(share.to_bytes());
      EXPECT_EQ(back.suite, share.suite);
      EXPECT_EQ(back.params, share.params);
      EXPECT_EQ(back.index, share.index);
      EXPECT_EQ(back.encryption_share, share.encryption_share);
      EXPECT_EQ(back.signing_share, share.signing_share);
      EXPECT_EQ(back.keys.encryption_pk, share.keys.encryption_pk);
      EXPECT_EQ(back.keys.signing_pk, share.keys.signing_pk);
      EXPECT_EQ(back.verification_share, share.verification_share);
    }
  }
}

TEST(ShareFile, RejectsCorruption) {
  SeededRng rng(51);
  const auto keys = deal_keys(Suite::ristretto255(), {2, 3}, rng);
  const Bytes good = keys.shares[1].to_bytes();
  EXPECT_EQ(good.size(), 4u + 1 + 1 + 2 + 2 + 2 + 32 * 5);

  Bytes bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(ModeratorShareFile::from_bytes(bad_magic), EncodingError);

  Bytes bad_index = good;
  bad_index[11] = 9;  // index > n
  EXPECT_THROW(ModeratorShareFile::from_bytes(bad_index), EncodingError);

  Bytes mismatched = good;
  mismatched[12 + 32 + 31] ^= 1;  // signing share no longer matches its verification share
  EXPECT_THROW(ModeratorShareFile::from_bytes(mismatched), EncodingError);

  EXPECT_THROW(ModeratorShareFile::from_bytes(ByteView(good).first(good.size() - 1)), EncodingError);
}

TEST(Roster, TextRoundTrip) {
  SeededRng rng(52);
  const auto keys = deal_keys(Suite::ristretto255(), {3, 5}, rng);
  const std::string text = keys.roster.to_text();
  EXPECT_EQ(text.rfind("cerberus-roster 1\n", 0), 0u);
  const auto back = ModeratorRoster::parse(text);
  EXPECT_EQ(back.suite, keys.roster.suite);
  EXPECT_EQ(back.params, keys.roster.params);
  EXPECT_EQ(back.keys.signing_pk, keys.roster.keys.signing_pk);
  ASSERT_EQ(back.moderators.size(), 5u);
  EXPECT_EQ(back.entry(3).address, "127.0.0.1:7103");
  EXPECT_EQ(back.to_text(), text);
}

TEST(Roster, CustomAddresses) {
  SeededRng rng(53);
  const std::vector<std::string> addrs{"10.0.0.1:80", "10.0.0.2:81"};
  const auto keys = deal_keys(Suite::toy23(), {1, 2}, rng, addrs);
  EXPECT_EQ(keys.roster.entry(2).address, "10.0.0.2:81");
  const std::vector<std::string> one{"x:1"};
  EXPECT_THROW(deal_keys(Suite::toy23(), {1, 2}, rng, one), InvalidArgument);
}

TEST(Roster, ParseErrors) {
  SeededRng rng(54);
  const std::string good = deal_keys(Suite::ristretto255(), {2, 3}, rng).roster.to_text();
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  EXPECT_THROW(ModeratorRoster::parse(""), EncodingError);
  EXPECT_THROW(ModeratorRoster::parse(replace("cerberus-roster 1", "cerberus-roster 2")), EncodingError);
  EXPECT_THROW(ModeratorRoster::parse(replace("suite ristretto255", "suite p256")), EncodingError);
  EXPECT_THROW(ModeratorRoster::parse(replace("threshold 2 3", "threshold 4 3")), EncodingError);
  EXPECT_THROW(ModeratorRoster::parse(replace("moderator 3 ", "moderator 2 ")), EncodingError);
  // Drop the last moderator line.
  EXPECT_THROW(ModeratorRoster::parse(good.substr(0, good.rfind("moderator 3"))), EncodingError);
}

TEST(WriteKeys, FilesAndForce) {
  TempDir dir;
  SeededRng rng(55);
  const auto keys = deal_keys(Suite::ristretto255(), {2, 3}, rng);
  write_keys(keys, dir.path(), false);
  for (std::uint32_t i = 1; i <= 3; ++i) {
    const auto path = share_file_name(dir.path(), i);
    ASSERT_TRUE(fs::exists(path));
    EXPECT_EQ(fs::status(path).permissions() & fs::perms::all, fs::perms::owner_read | fs::perms::owner_write);
    EXPECT_EQ(ModeratorShareFile::load(path).signing_share, keys.shares[i - 1].signing_share);
  }
  EXPECT_EQ(ModeratorRoster::load(roster_file_name(dir.path())).to_text(), keys.roster.to_text());

  const auto again = deal_keys(Suite::ristretto255(), {2, 3}, rng);
  EXPECT_THROW(write_keys(again, dir.path(), false), Error);
  EXPECT_EQ(ModeratorShareFile::load(share_file_name(dir.path(), 1)).signing_share, keys.shares[0].signing_share);
  write_keys(again, dir.path(), true);
  EXPECT_EQ(ModeratorShareFile::load(share_file_name(dir.path(), 1)).signing_share, again.shares[0].signing_share);
}

TEST(WriteKeys, LoadMissingFile) {
  TempDir dir;
  EXPECT_THROW(ModeratorShareFile::load(dir.path() / "nope.share"), Error);
  EXPECT_THROW(ModeratorRoster::load(dir.path() / "nope.txt"), Error);
}

}  // namespace
}  // namespace cerberus
