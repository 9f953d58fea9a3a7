#include "cerberus/wire.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include "test_util.hpp"

namespace cerberus {
namespace {

using nlohmann::json;
const Suite& prod = Suite::ristretto255();

class Wire : public ::testing::Test {
 protected:
  SeededRng rng{60};
  DealtKeys keys = deal_keys(prod, {2, 3}, rng);
  PendingToken pending = begin_token(Identity::from_account("carol"), keys.roster.keys.encryption_pk,
                                     [] { return std::int64_t{1700000000}; }, rng);
};

TEST_F(Wire, Round1RequestRoundTrip) {
  const std::vector<TokenRequest> reqs{pending.request, pending.request};
  const auto back = wire::decode_round1_request(prod, wire::encode_round1_request(reqs));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].id_src, pending.request.id_src);
  EXPECT_EQ(back[0].x1, pending.request.x1);
  EXPECT_EQ(back[0].r, pending.request.r);
  EXPECT_EQ(back[0].pk_eph, pending.request.pk_eph);
  EXPECT_EQ(back[0].issued_at, pending.request.issued_at);
}

TEST_F(Wire, Round1RequestStrictness) {
  const std::vector<TokenRequest> reqs{pending.request};
  const json good = json::parse(wire::encode_round1_request(reqs));
  auto bad = [&](auto edit) {
    json j = good;
    edit(j);
    return j.dump();
  };
  EXPECT_THROW(wire::decode_round1_request(prod, "not json"), wire::MalformedBody);
  EXPECT_THROW(wire::decode_round1_request(prod, "[]"), wire::MalformedBody);
  EXPECT_THROW(wire::decode_round1_request(prod, bad([](json& j) { j["extra"] = 1; })), wire::MalformedBody);
  EXPECT_THROW(wire::decode_round1_request(prod, bad([](json& j) { j["version"] = 2; })), wire::MalformedBody);
  EXPECT_THROW(wire::decode_round1_request(prod, bad([](json& j) { j["requests"] = json::array(); })),
               wire::MalformedBody);
  EXPECT_THROW(wire::decode_round1_request(prod, bad([](json& j) { j["requests"][0].erase("r"); })),
               wire::MalformedBody);
  EXPECT_THROW(wire::decode_round1_request(prod, bad([](json& j) { j["requests"][0]["issued_at"] = -1; })),
               wire::MalformedBody);
  EXPECT_THROW(wire::decode_round1_request(prod, bad([](json& j) { j["requests"][0]["r"] = "zz"; })),
               wire::MalformedBody);
  EXPECT_THROW(wire::decode_round1_request(prod, bad([](json& j) {
                 std::string s = j["requests"][0]["x1"];
                 for (auto& c : s) c = static_cast<char>(std::toupper(c));
                 j["requests"][0]["x1"] = s;
               })),
               wire::MalformedBody);
  // An identity ephemeral key does not decode.
  EXPECT_THROW(wire::decode_round1_request(prod, bad([](json& j) { j["requests"][0]["pk_eph"] = std::string(64, '0'); })),
               wire::MalformedBody);
}

TEST_F(Wire, Round1ResponseMixesAcceptAndReject) {
  auto out = round1_commit(prod, 2, rng);
  wire::SessionId sid{};
  sid[0] = 7;
  const std::vector<wire::Round1Result> results{wire::Round1Accepted{sid, out.commitment},
                                                wire::Rejection{"bad-encryption"}};
  const auto back = wire::decode_round1_response(prod, wire::encode_round1_response(results));
  ASSERT_EQ(back.size(), 2u);
  const auto& ok = std::get<wire::Round1Accepted>(back[0]);
  EXPECT_EQ(ok.session_id, sid);
  EXPECT_EQ(ok.commitment, out.commitment);
  EXPECT_EQ(std::get<wire::Rejection>(back[1]).reason, "bad-encryption");
}

TEST_F(Wire, Round2RoundTrip) {
  auto a = round1_commit(prod, 1, rng);
  auto b = round1_commit(prod, 3, rng);
  const std::vector<wire::Round2Item> items{{wire::SessionId{}, {a.commitment, b.commitment}}};
  const auto back = wire::decode_round2_request(prod, wire::encode_round2_request(items));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].roster, items[0].roster);

  const std::vector<wire::Round2Result> results{SignatureShare{3, prod.from_u64(99)}, wire::Rejection{"unknown-session"}};
  const auto r = wire::decode_round2_response(prod, wire::encode_round2_response(results));
  EXPECT_EQ(std::get<SignatureShare>(r[0]).index, 3u);
  EXPECT_EQ(std::get<SignatureShare>(r[0]).z, prod.from_u64(99));
  EXPECT_EQ(std::get<wire::Rejection>(r[1]).reason, "unknown-session");

  json j = json::parse(wire::encode_round2_request(items));
  j["items"][0]["roster"][0]["index"] = 0;
  EXPECT_THROW(wire::decode_round2_request(prod, j.dump()), wire::MalformedBody);
  j = json::parse(wire::encode_round2_request(items));
  j["items"][0]["session_id"] = "00";
  EXPECT_THROW(wire::decode_round2_request(prod, j.dump()), wire::MalformedBody);
}

TEST_F(Wire, ReportRoundTrip) {
  const Token token = testing::issue_locally(keys, {0, 2}, pending.request, rng);
  TokenLedger ledger;
  const ReportRequest report{seal_message(bytes_of("report me"), token, pending.sk_eph, ledger, rng)};
  const auto back = wire::decode_report_request(prod, wire::encode_report_request(report));
  EXPECT_EQ(back.envelope, report.envelope);

  const DecryptionShare share{2, prod.generator()};
  const auto approved = wire::decode_report_response(prod, wire::encode_report_response(share));
  EXPECT_EQ(std::get<DecryptionShare>(approved).index, 2u);
  EXPECT_EQ(std::get<DecryptionShare>(approved).d, prod.generator());
  EXPECT_TRUE(std::holds_alternative<wire::Denied>(
      wire::decode_report_response(prod, wire::encode_report_response(wire::Denied{}))));
  EXPECT_THROW(wire::decode_report_response(prod, R"({"version":1,"vote":"maybe"})"), wire::MalformedBody);
  EXPECT_THROW(wire::decode_report_response(prod, R"({"version":1,"vote":"deny","d":"00"})"), wire::MalformedBody);
}

TEST(WireError, RoundTrip) {
  EXPECT_EQ(wire::decode_error(wire::encode_error("x2-mismatch")), "x2-mismatch");
  EXPECT_EQ(wire::decode_error("{}"), "malformed");
  EXPECT_EQ(wire::decode_error("<html>"), "malformed");
}

}  // namespace
}  // namespace cerberus
