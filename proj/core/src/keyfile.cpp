#include "cerberus/keyfile.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

namespace cerberus {

namespace {

constexpr std::string_view kShareMagic = "CRBS";
constexpr std::string_view kRosterHeader = "cerberus-roster";

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, ByteView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("short write to " + path.string());
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  for (std::string word; in >> word;) out.push_back(word);
  return out;
}

std::uint32_t parse_u32(const std::string& s) {
  try {
    std::size_t pos = 0;
    const unsigned long v = std::stoul(s, &pos);
    if (pos != s.size() || v > 0xffffffffUL) throw EncodingError("bad integer '" + s + "'");
    return static_cast<std::uint32_t>(v);
  } catch (const std::logic_error&) {
    throw EncodingError("bad integer '" + s + "'");
  }
}

}  // namespace

// --- share files ----------------------------------------------------------

Bytes ModeratorShareFile::to_bytes() const {
  Bytes out(kShareMagic.begin(), kShareMagic.end());
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(suite->id()));
  append_u16(out, static_cast<std::uint16_t>(params.k));
  append_u16(out, static_cast<std::uint16_t>(params.n));
  append_u16(out, static_cast<std::uint16_t>(index));
  append(out, encryption_share.encode());
  append(out, signing_share.encode());
  append(out, keys.encryption_pk.encode());
  append(out, keys.signing_pk.encode());
  append(out, verification_share.encode());
  return out;
}

ModeratorShareFile ModeratorShareFile::from_bytes(ByteView bytes) {
  ByteReader r(bytes);
  ByteView magic = r.take(kShareMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kShareMagic.begin())) throw EncodingError("not a share file");
  if (r.u8() != kVersion) throw EncodingError("unsupported share file version");
  const Suite& suite = Suite::get(static_cast<SuiteId>(r.u8()));
  ThresholdParams params{r.u16(), 0};
  params.n = r.u16();
  const std::uint32_t index = r.u16();
  try {
    params.validate();
  } catch (const InvalidArgument& e) {
    throw EncodingError(e.what());
  }
  if (index < 1 || index > params.n) throw EncodingError("share index out of range");
  const std::size_t ss = suite.scalar_size();
  const std::size_t es = suite.element_size();
  Scalar enc = suite.decode_scalar(r.take(ss));
  Scalar sig = suite.decode_scalar(r.take(ss));
  GroupElement enc_pk = suite.decode_element(r.take(es));
  GroupElement sig_pk = suite.decode_element(r.take(es));
  GroupElement vshare = suite.decode_element(r.take(es), IdentityPolicy::kAllow);
  r.expect_done();
  if (!(suite.base_pow(sig) == vshare)) throw EncodingError("verification share does not match signing share");
  return {&suite, params, index, enc, sig, {enc_pk, sig_pk}, vshare};
}

void ModeratorShareFile::save(const std::filesystem::path& path) const { write_file(path, to_bytes()); }

ModeratorShareFile ModeratorShareFile::load(const std::filesystem::path& path) {
  return from_bytes(read_file(path));
}

// --- roster ---------------------------------------------------------------

std::vector<GroupElement> ModeratorRoster::verification_shares() const {
  std::vector<GroupElement> out;
  out.reserve(moderators.size());
  for (const auto& m : moderators) out.push_back(m.verification_share);
  return out;
}

const RosterEntry& ModeratorRoster::entry(std::uint32_t index) const {
  if (index < 1 || index > moderators.size()) throw InvalidArgument("no moderator " + std::to_string(index));
  return moderators[index - 1];
}

std::string ModeratorRoster::to_text() const {
  std::ostringstream out;
  out << kRosterHeader << ' ' << kVersion << '\n'
      << "suite " << suite->name() << '\n'
      << "threshold " << params.k << ' ' << params.n << '\n'
      << "encryption-key " << to_hex(keys.encryption_pk.encode()) << '\n'
      << "signing-key " << to_hex(keys.signing_pk.encode()) << '\n';
  for (const auto& m : moderators) {
    out << "moderator " << m.index << ' ' << m.address << ' ' << to_hex(m.verification_share.encode()) << '\n';
  }
  return out.str();
}

ModeratorRoster ModeratorRoster::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto next = [&]() -> std::vector<std::string> {
    while (std::getline(in, line)) {
      auto words = split_ws(line);
      if (!words.empty() && words[0][0] != '#') return words;
    }
    return {};
  };
  auto expect = [&](std::string_view key, std::size_t count) {
    auto words = next();
    if (words.size() != count + 1 || words[0] != key) throw EncodingError("roster: expected '" + std::string(key) + "'");
    return words;
  };

  auto header = expect(kRosterHeader, 1);
  if (parse_u32(header[1]) != static_cast<std::uint32_t>(kVersion)) throw EncodingError("roster: unsupported version");
  const Suite* suite = nullptr;
  try {
    suite = &Suite::by_name(expect("suite", 1)[1]);
  } catch (const InvalidArgument& e) {
    throw EncodingError(e.what());
  }
  auto thr = expect("threshold", 2);
  ThresholdParams params{parse_u32(thr[1]), parse_u32(thr[2])};
  try {
    params.validate();
  } catch (const InvalidArgument& e) {
    throw EncodingError(e.what());
  }
  GroupKeys keys{suite->decode_element(from_hex(expect("encryption-key", 1)[1])),
                 suite->decode_element(from_hex(expect("signing-key", 1)[1]))};

  std::vector<RosterEntry> moderators;
  for (auto words = next(); !words.empty(); words = next()) {
    if (words.size() != 4 || words[0] != "moderator") throw EncodingError("roster: bad moderator line");
    moderators.push_back({parse_u32(words[1]), words[2],
                          suite->decode_element(from_hex(words[3]), IdentityPolicy::kAllow)});
  }
  std::sort(moderators.begin(), moderators.end(),
            [](const RosterEntry& a, const RosterEntry& b) { return a.index < b.index; });
  if (moderators.size() != params.n) throw EncodingError("roster: moderator count does not match n");
  for (std::size_t i = 0; i < moderators.size(); ++i) {
    if (moderators[i].index != i + 1) throw EncodingError("roster: moderator indices must be 1..n");
  }
  return {suite, params, keys, std::move(moderators)};
}

void ModeratorRoster::save(const std::filesystem::path& path) const {
  const std::string text = to_text();
  write_file(path, as_bytes(text));
}

ModeratorRoster ModeratorRoster::load(const std::filesystem::path& path) {
  const Bytes data = read_file(path);
  return parse(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

// --- dealer ---------------------------------------------------------------

DealtKeys deal_keys(const Suite& suite, ThresholdParams params, Rng& rng,
                    std::span<const std::string> addresses, std::uint16_t base_port) {
  params.validate();
  if (!addresses.empty() && addresses.size() != params.n) {
    throw InvalidArgument("need one address per moderator");
  }
  const Scalar enc_secret = suite.random_nonzero_scalar(rng);
  const Scalar sig_secret = suite.random_nonzero_scalar(rng);
  const GroupKeys keys{suite.base_pow(enc_secret), suite.base_pow(sig_secret)};
  const auto enc_shares = deal(enc_secret, params, rng);
  const auto sig_shares = deal(sig_secret, params, rng);

  DealtKeys out{enc_secret, sig_secret, {}, {&suite, params, keys, {}}};
  for (std::uint32_t i = 0; i < params.n; ++i) {
    const GroupElement vshare = suite.base_pow(sig_shares[i].value);
    out.shares.push_back({&suite, params, i + 1, enc_shares[i].value, sig_shares[i].value, keys, vshare});
    std::string address = addresses.empty() ? "127.0.0.1:" + std::to_string(base_port + i + 1) : addresses[i];
    out.roster.moderators.push_back({i + 1, std::move(address), vshare});
  }
  return out;
}

std::filesystem::path share_file_name(const std::filesystem::path& dir, std::uint32_t index) {
  return dir / ("moderator-" + std::to_string(index) + ".share");
}

std::filesystem::path roster_file_name(const std::filesystem::path& dir) { return dir / "roster.txt"; }

void write_keys(const DealtKeys& keys, const std::filesystem::path& out_dir, bool force) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> targets;
  for (const auto& s : keys.shares) targets.push_back(share_file_name(out_dir, s.index));
  targets.push_back(roster_file_name(out_dir));
  if (!force) {
    for (const auto& t : targets) {
      if (std::filesystem::exists(t)) throw InvalidArgument(t.string() + " exists (use --force to overwrite)");
    }
  }
  for (const auto& s : keys.shares) {
    const auto path = share_file_name(out_dir, s.index);
    s.save(path);
    std::filesystem::permissions(path, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
  }
  keys.roster.save(roster_file_name(out_dir));
}

}  // namespace cerberus
