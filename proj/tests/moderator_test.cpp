#include "cerberus/moderator.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "cerberus/server.hpp"
#include "cerberus/transport.hpp"
#include "test_util.hpp"

namespace cerberus {
namespace {

using nlohmann::json;
const Suite& prod = Suite::ristretto255();

class Node : public ::testing::Test {
 protected:
  SeededRng rng{70};
  std::int64_t now = 1700000000;
  DealtKeys keys = deal_keys(prod, {2, 3}, rng);
  std::chrono::steady_clock::time_point steady{};
  ModeratorNode node{keys.shares[0], VotePolicy::always_approve(), ModeratorNode::Options{}, [this] { return now; },
                     [this] { return steady; }};

  PendingToken fresh(const std::string& who = "dave") {
    return begin_token(Identity::from_account(who), keys.roster.keys.encryption_pk, [this] { return now; }, rng);
  }
};

TEST_F(Node, Round1AcceptsValidAndRejectsBadRequests) {
  const auto p = fresh();
  EXPECT_TRUE(std::holds_alternative<wire::Round1Accepted>(node.handle_token_round1(p.request)));

  auto substituted = p.request;
  substituted.id_src = Identity::from_account("someone-else");
  const auto r = node.handle_token_round1(substituted);
  ASSERT_TRUE(std::holds_alternative<wire::Rejection>(r));
  EXPECT_EQ(std::get<wire::Rejection>(r).reason, "bad-encryption");

  auto stale = fresh();
  now += 1000;
  EXPECT_EQ(std::get<wire::Rejection>(node.handle_token_round1(stale.request)).reason, "stale-timestamp");
  EXPECT_EQ(node.open_sessions(), 1u);
}

TEST_F(Node, SessionsAreSingleUse) {
  const auto p = fresh();
  auto mine = std::get<wire::Round1Accepted>(node.handle_token_round1(p.request));
  ModeratorNode other{keys.shares[1], VotePolicy::always_approve(), {}, [this] { return now; }};
  auto theirs = std::get<wire::Round1Accepted>(other.handle_token_round1(p.request));
  const std::vector<NonceCommitment> roster{mine.commitment, theirs.commitment};

  EXPECT_TRUE(std::holds_alternative<SignatureShare>(node.handle_token_round2(mine.session_id, roster)));
  EXPECT_EQ(std::get<wire::Rejection>(node.handle_token_round2(mine.session_id, roster)).reason, "consumed-session");
  EXPECT_EQ(std::get<wire::Rejection>(node.handle_token_round2(wire::SessionId{}, roster)).reason, "unknown-session");
}

TEST_F(Node, BadRosterBurnsTheSession) {
  const auto p = fresh();
  auto mine = std::get<wire::Round1Accepted>(node.handle_token_round1(p.request));
  auto forged = mine.commitment;
  forged.hiding = forged.hiding * prod.generator();
  const std::vector<NonceCommitment> bad{forged};
  EXPECT_EQ(std::get<wire::Rejection>(node.handle_token_round2(mine.session_id, bad)).reason, "bad-roster");
  const std::vector<NonceCommitment> good{mine.commitment};
  EXPECT_EQ(std::get<wire::Rejection>(node.handle_token_round2(mine.session_id, good)).reason, "consumed-session");
}

TEST_F(Node, SessionsExpire) {
  const auto p = fresh();
  auto mine = std::get<wire::Round1Accepted>(node.handle_token_round1(p.request));
  steady += std::chrono::seconds(61);
  const std::vector<NonceCommitment> roster{mine.commitment};
  EXPECT_EQ(std::get<wire::Rejection>(node.handle_token_round2(mine.session_id, roster)).reason, "unknown-session");
}

TEST_F(Node, ConcurrentRound2YieldsOneShare) {
  const auto p = fresh();
  auto mine = std::get<wire::Round1Accepted>(node.handle_token_round1(p.request));
  const std::vector<NonceCommitment> roster{mine.commitment};
  const std::vector<wire::Round2Item> items{{mine.session_id, roster}};
  const std::string body = wire::encode_round2_request(items);

  std::atomic<int> shares{0};
  std::atomic<int> consumed{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 32; ++i) {
    threads.emplace_back([&] {
      const auto reply = node.dispatch(wire::kRound2Path, body);
      const auto results = wire::decode_round2_response(prod, reply.body);
      if (std::holds_alternative<SignatureShare>(results.at(0))) ++shares;
      else if (std::get<wire::Rejection>(results.at(0)).reason == "consumed-session") ++consumed;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(shares.load(), 1);
  EXPECT_EQ(consumed.load(), 31);
}

TEST_F(Node, SessionCapacity) {
  ModeratorNode small{keys.shares[0], VotePolicy::always_approve(), {kDefaultSkewSecs, 2, 60}, [this] { return now; },
                      [this] { return steady; }};
  EXPECT_TRUE(std::holds_alternative<wire::Round1Accepted>(small.handle_token_round1(fresh().request)));
  EXPECT_TRUE(std::holds_alternative<wire::Round1Accepted>(small.handle_token_round1(fresh().request)));
  EXPECT_EQ(std::get<wire::Rejection>(small.handle_token_round1(fresh().request)).reason, "session-capacity");
  steady += std::chrono::seconds(61);
  EXPECT_TRUE(std::holds_alternative<wire::Round1Accepted>(small.handle_token_round1(fresh().request)));
}

TEST_F(Node, ReportsAreIdempotent) {
  const auto p = fresh();
  const Token token = testing::issue_locally(keys, {0, 1}, p.request, rng);
  TokenLedger ledger;
  const ReportRequest report{seal_message(bytes_of("hi"), token, p.sk_eph, ledger, rng)};
  const std::string body = wire::encode_report_request(report);
  const auto first = node.dispatch(wire::kReportPath, body);
  const auto second = node.dispatch(wire::kReportPath, body);
  EXPECT_EQ(first.status, 200);
  EXPECT_EQ(first.body, second.body);
}

TEST_F(Node, DispatchStatusCodes) {
  EXPECT_EQ(node.dispatch("/v1/nothing", "{}").status, 404);
  EXPECT_EQ(node.dispatch(wire::kRound1Path, "{").status, 400);
  EXPECT_EQ(wire::decode_error(node.dispatch(wire::kRound1Path, "{").body), "malformed");

  const auto p = fresh();
  const Token token = testing::issue_locally(keys, {1, 2}, p.request, rng);
  TokenLedger ledger;
  ReportRequest report{seal_message(bytes_of("hi"), token, p.sk_eph, ledger, rng)};
  report.envelope.message = bytes_of("edited");
  const auto reply = node.dispatch(wire::kReportPath, wire::encode_report_request(report));
  EXPECT_EQ(reply.status, 422);
  EXPECT_EQ(wire::decode_error(reply.body), "x2-mismatch");
}

TEST_F(Node, KeywordPolicy) {
  ModeratorNode picky{keys.shares[0], VotePolicy::parse("keyword-list:scam"), {}, [this] { return now; }};
  const auto p = fresh();
  const Token token = testing::issue_locally(keys, {0, 1}, p.request, rng);
  TokenLedger ledger;
  const ReportRequest report{seal_message(bytes_of("this is a SCAM"), token, p.sk_eph, ledger, rng)};
  EXPECT_EQ(picky.handle_report(report).kind, VoteOutcome::Kind::kShare);

  const auto q = fresh();
  const Token token2 = testing::issue_locally(keys, {0, 1}, q.request, rng);
  const ReportRequest innocent{seal_message(bytes_of("lunch?"), token2, q.sk_eph, ledger, rng)};
  EXPECT_EQ(picky.handle_report(innocent).kind, VoteOutcome::Kind::kDeny);
}

TEST(Config, ParseAndValidate) {
  const auto cfg = ModeratorConfig::parse(R"({"index":2,"listen":"0.0.0.0:9000","share_file":"m.share",
                                             "policy":"always-deny","skew_secs":10,"nonce_pool":5,
                                             "session_ttl_secs":30,"auth_token":"s3cret"})");
  EXPECT_EQ(cfg.index, 2u);
  EXPECT_EQ(cfg.listen, "0.0.0.0:9000");
  EXPECT_EQ(cfg.nonce_pool, 5u);
  EXPECT_EQ(cfg.auth_token, "s3cret");
  EXPECT_NO_THROW(cfg.validate());

  EXPECT_THROW(ModeratorConfig::parse(R"({"bogus":1})"), InvalidArgument);
  EXPECT_THROW(ModeratorConfig::parse(R"({"index":"two"})"), InvalidArgument);
  EXPECT_THROW(ModeratorConfig::parse("[]"), InvalidArgument);
  EXPECT_THROW(ModeratorConfig::parse(R"({"listen":"x:1"})").validate(), InvalidArgument);  // no share file
  EXPECT_THROW(ModeratorConfig::parse(R"({"share_file":"a","policy":"maybe"})").validate(), InvalidArgument);
  EXPECT_THROW(ModeratorConfig::parse(R"({"share_file":"a","nonce_pool":0})").validate(), InvalidArgument);
}

TEST(Config, LoadResolvesShareFileAndChecksIndex) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("cerberus-mod-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  SeededRng rng(71);
  write_keys(deal_keys(prod, {2, 3}, rng), dir, false);
  std::ofstream(dir / "m2.json") << R"({"index":2,"share_file":"moderator-2.share"})";
  std::ofstream(dir / "wrong.json") << R"({"index":3,"share_file":"moderator-2.share"})";

  const auto cfg = ModeratorConfig::load(dir / "m2.json");
  EXPECT_EQ(cfg.share_file, dir / "moderator-2.share");
  EXPECT_EQ(make_moderator(cfg)->index(), 2u);
  EXPECT_THROW(make_moderator(ModeratorConfig::load(dir / "wrong.json")), InvalidArgument);
  fs::remove_all(dir);
}

TEST(Server, HttpRoundTripAndAuth) {
  SeededRng rng(72);
  const auto keys = deal_keys(prod, {1, 1}, rng);
  auto node = std::make_shared<ModeratorNode>(keys.shares[0], VotePolicy::always_approve(), ModeratorNode::Options{});
  ModeratorServer server(node, "tok");
  server.bind("127.0.0.1", 0);
  server.start();
  const std::string address = "127.0.0.1:" + std::to_string(server.port());

  const auto p = begin_token(Identity::from_account("erin"), keys.roster.keys.encryption_pk, system_unix_clock(), rng);
  const std::vector<TokenRequest> reqs{p.request};
  const std::string body = wire::encode_round1_request(reqs);

  HttpTransport good("tok");
  const auto ok = good.post(address, wire::kRound1Path, body, std::chrono::milliseconds(2000));
  EXPECT_EQ(ok.status, 200);
  EXPECT_TRUE(std::holds_alternative<wire::Round1Accepted>(wire::decode_round1_response(prod, ok.body).at(0)));

  HttpTransport bad("nope");
  EXPECT_EQ(bad.post(address, wire::kRound1Path, body, std::chrono::milliseconds(2000)).status, 401);
  server.stop();
  EXPECT_THROW(good.post(address, wire::kRound1Path, body, std::chrono::milliseconds(500)), TransportError);
}

}  // namespace
}  // namespace cerberus
