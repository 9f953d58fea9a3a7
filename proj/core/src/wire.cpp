#include "cerberus/wire.hpp"

#include <algorithm>
#include <initializer_list>

#include <json.hpp>

namespace cerberus::wire {

namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& what) { throw MalformedBody("malformed body: " + what); }

json parse(std::string_view body) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) malformed("not JSON");
  if (!j.is_object()) malformed("top level is not an object");
  return j;
}

void require_fields(const json& j, std::initializer_list<std::string_view> fields) {
  if (!j.is_object()) malformed("expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(fields.begin(), fields.end(), key) == fields.end()) malformed("unknown field '" + key + "'");
  }
  for (auto f : fields) {
    if (!j.contains(f)) malformed("missing field '" + std::string(f) + "'");
  }
}

void check_version(const json& j) {
  if (!j["version"].is_number_integer() || j["version"].get<int>() != kVersion) malformed("unsupported version");
}

Bytes hex_field(const json& j, std::string_view key) {
  const json& v = j.at(std::string(key));
  if (!v.is_string()) malformed(std::string(key) + " is not a string");
  const auto& s = v.get_ref<const std::string&>();
  if (std::any_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'F'; })) {
    malformed(std::string(key) + " is not lowercase hex");
  }
  try {
    return from_hex(s);
  } catch (const EncodingError&) {
    malformed(std::string(key) + " is not hex");
  }
}

std::uint64_t u64_field(const json& j, std::string_view key) {
  const json& v = j.at(std::string(key));
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    malformed(std::string(key) + " is not a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::uint32_t index_field(const json& j) {
  const std::uint64_t v = u64_field(j, "index");
  if (v == 0 || v > 0xffff) malformed("index out of range");
  return static_cast<std::uint32_t>(v);
}

const json& array_field(const json& j, std::string_view key) {
  const json& v = j.at(std::string(key));
  if (!v.is_array()) malformed(std::string(key) + " is not an array");
  return v;
}

// Decoding of cryptographic values: any EncodingError becomes MalformedBody.
template <typename F>
auto decoding(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const MalformedBody&) {
    throw;
  } catch (const EncodingError& e) {
    malformed(e.what());
  } catch (const InvalidArgument& e) {
    malformed(e.what());
  }
}

std::string hex(ByteView b) { return to_hex(b); }

SessionId session_field(const json& j) {
  const Bytes b = hex_field(j, "session_id");
  SessionId id{};
  if (b.size() != id.size()) malformed("session_id must be 16 bytes");
  std::copy(b.begin(), b.end(), id.begin());
  return id;
}

json commitment_json(const NonceCommitment& c) {
  return {{"index", c.index}, {"hiding", hex(c.hiding.encode())}, {"binding", hex(c.binding.encode())}};
}

NonceCommitment commitment_from(const Suite& suite, const json& j) {
  require_fields(j, {"index", "hiding", "binding"});
  return decoding([&] {
    return NonceCommitment{index_field(j), suite.decode_element(hex_field(j, "hiding")),
                           suite.decode_element(hex_field(j, "binding"))};
  });
}

json token_json(const Token& t) {
  return {{"x1", hex(t.x1.to_bytes())},
          {"pk_eph", hex(t.pk_eph.encode())},
          {"issued_at", t.issued_at},
          {"sig_mod", hex(t.sig_mod.to_bytes())}};
}

Token token_from(const Suite& suite, const json& j) {
  require_fields(j, {"x1", "pk_eph", "issued_at", "sig_mod"});
  return decoding([&] {
    return Token{IdentityCiphertext::from_bytes(suite, hex_field(j, "x1")),
                 suite.decode_element(hex_field(j, "pk_eph")), u64_field(j, "issued_at"),
                 Signature::from_bytes(suite, hex_field(j, "sig_mod"))};
  });
}

std::optional<std::string> error_of(const json& j) {
  if (j.is_object() && j.size() == 1 && j.contains("error")) {
    if (!j["error"].is_string()) malformed("error is not a string");
    return j["error"].get<std::string>();
  }
  return std::nullopt;
}

}  // namespace

// --- round 1 --------------------------------------------------------------

std::string encode_round1_request(std::span<const TokenRequest> requests) {
  json items = json::array();
  for (const auto& r : requests) {
    items.push_back({{"id_src", hex(r.id_src.bytes())},
                     {"x1", hex(r.x1.to_bytes())},
                     {"r", hex(r.r.encode())},
                     {"pk_eph", hex(r.pk_eph.encode())},
                     {"issued_at", r.issued_at}});
  }
  return json{{"version", kVersion}, {"requests", std::move(items)}}.dump();
}

std::vector<TokenRequest> decode_round1_request(const Suite& suite, std::string_view body) {
  const json j = parse(body);
  require_fields(j, {"version", "requests"});
  check_version(j);
  std::vector<TokenRequest> out;
  for (const json& item : array_field(j, "requests")) {
    require_fields(item, {"id_src", "x1", "r", "pk_eph", "issued_at"});
    out.push_back(decoding([&] {
      return TokenRequest{Identity::from_bytes(hex_field(item, "id_src")),
                          IdentityCiphertext::from_bytes(suite, hex_field(item, "x1")),
                          suite.decode_scalar(hex_field(item, "r")), suite.decode_element(hex_field(item, "pk_eph")),
                          u64_field(item, "issued_at")};
    }));
  }
  if (out.empty()) malformed("empty request batch");
  return out;
}

std::string encode_round1_response(std::span<const Round1Result> results) {
  json items = json::array();
  for (const auto& r : results) {
    if (const auto* ok = std::get_if<Round1Accepted>(&r)) {
      items.push_back({{"session_id", hex(ok->session_id)}, {"commitment", commitment_json(ok->commitment)}});
    } else {
      items.push_back({{"error", std::get<Rejection>(r).reason}});
    }
  }
  return json{{"version", kVersion}, {"results", std::move(items)}}.dump();
}

std::vector<Round1Result> decode_round1_response(const Suite& suite, std::string_view body) {
  const json j = parse(body);
  require_fields(j, {"version", "results"});
  check_version(j);
  std::vector<Round1Result> out;
  for (const json& item : array_field(j, "results")) {
    if (auto err = error_of(item)) {
      out.emplace_back(Rejection{*err});
      continue;
    }
    require_fields(item, {"session_id", "commitment"});
    out.emplace_back(Round1Accepted{session_field(item), commitment_from(suite, item["commitment"])});
  }
  return out;
}

// --- round 2 --------------------------------------------------------------

std::string encode_round2_request(std::span<const Round2Item> items) {
  json arr = json::array();
  for (const auto& item : items) {
    json roster = json::array();
    for (const auto& c : item.roster) roster.push_back(commitment_json(c));
    arr.push_back({{"session_id", hex(item.session_id)}, {"roster", std::move(roster)}});
  }
  return json{{"version", kVersion}, {"items", std::move(arr)}}.dump();
}

std::vector<Round2Item> decode_round2_request(const Suite& suite, std::string_view body) {
  const json j = parse(body);
  require_fields(j, {"version", "items"});
  check_version(j);
  std::vector<Round2Item> out;
  for (const json& item : array_field(j, "items")) {
    require_fields(item, {"session_id", "roster"});
    Round2Item r{session_field(item), {}};
    for (const json& c : array_field(item, "roster")) r.roster.push_back(commitment_from(suite, c));
    if (r.roster.empty()) malformed("empty roster");
    out.push_back(std::move(r));
  }
  if (out.empty()) malformed("empty item batch");
  return out;
}

std::string encode_round2_response(std::span<const Round2Result> results) {
  json items = json::array();
  for (const auto& r : results) {
    if (const auto* share = std::get_if<SignatureShare>(&r)) {
      items.push_back({{"index", share->index}, {"z", hex(share->z.encode())}});
    } else {
      items.push_back({{"error", std::get<Rejection>(r).reason}});
    }
  }
  return json{{"version", kVersion}, {"results", std::move(items)}}.dump();
}

std::vector<Round2Result> decode_round2_response(const Suite& suite, std::string_view body) {
  const json j = parse(body);
  require_fields(j, {"version", "results"});
  check_version(j);
  std::vector<Round2Result> out;
  for (const json& item : array_field(j, "results")) {
    if (auto err = error_of(item)) {
      out.emplace_back(Rejection{*err});
      continue;
    }
    require_fields(item, {"index", "z"});
    out.emplace_back(decoding([&] { return SignatureShare{index_field(item), suite.decode_scalar(hex_field(item, "z"))}; }));
  }
  return out;
}

// --- report ---------------------------------------------------------------

std::string encode_report_request(const ReportRequest& report) {
  const MessageEnvelope& env = report.envelope;
  json envelope = {{"message", hex(env.message)},
                   {"token", token_json(env.token)},
                   {"x2", hex(env.x2)},
                   {"sig_src", hex(env.sig_src.to_bytes())}};
  return json{{"version", kVersion}, {"envelope", std::move(envelope)}}.dump();
}

ReportRequest decode_report_request(const Suite& suite, std::string_view body) {
  const json j = parse(body);
  require_fields(j, {"version", "envelope"});
  check_version(j);
  const json& e = j["envelope"];
  require_fields(e, {"message", "token", "x2", "sig_src"});
  MessageEnvelope env{hex_field(e, "message"), token_from(suite, e["token"]), hex_field(e, "x2"),
                      decoding([&] { return Signature::from_bytes(suite, hex_field(e, "sig_src")); })};
  if (env.x2.size() != IdentityCiphertext::wire_size(suite)) malformed("x2 has wrong length");
  return {std::move(env)};
}

std::string encode_report_response(const ReportResult& result) {
  if (const auto* share = std::get_if<DecryptionShare>(&result)) {
    return json{{"version", kVersion}, {"vote", "approve"}, {"index", share->index}, {"d", hex(share->d.encode())}}
        .dump();
  }
  return json{{"version", kVersion}, {"vote", "deny"}}.dump();
}

ReportResult decode_report_response(const Suite& suite, std::string_view body) {
  const json j = parse(body);
  if (!j.contains("vote") || !j["vote"].is_string()) malformed("missing vote");
  const auto vote = j["vote"].get<std::string>();
  if (vote == "deny") {
    require_fields(j, {"version", "vote"});
    check_version(j);
    return Denied{};
  }
  if (vote != "approve") malformed("unknown vote '" + vote + "'");
  require_fields(j, {"version", "vote", "index", "d"});
  check_version(j);
  return decoding([&] {
    // A zero share legitimately yields the identity element.
    return DecryptionShare{index_field(j), suite.decode_element(hex_field(j, "d"), IdentityPolicy::kAllow)};
  });
}

std::string encode_error(std::string_view reason) { return json{{"error", reason}}.dump(); }

std::string decode_error(std::string_view body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) return "malformed";
  try {
    if (auto err = error_of(j)) return *err;
  } catch (const MalformedBody&) {
  }
  return "malformed";
}

}  // namespace cerberus::wire
