#include "cerberus/client.hpp"

#include <algorithm>
#include <condition_variable>
#include <functional>
#include <set>
#include <thread>

#include "cerberus/wire.hpp"

namespace cerberus {

namespace {

// kPending: no answer yet when collection stopped early with enough replies.
enum class ReplyStatus { kOk, kDenied, kRejected, kUnreachable, kFaulty, kPending };

template <typename T>
struct Reply {
  std::uint32_t index;
  ReplyStatus status;
  std::optional<T> value;
};

// Sends one request per target concurrently and returns replies in arrival
// order once `need` of them are kOk, every target has answered, or the
// deadline passes. Silent targets are unreachable after the deadline and
// pending otherwise. Workers are detached, so `call` must own everything it
// uses.
template <typename T>
std::vector<Reply<T>> fan_out(const std::vector<std::uint32_t>& targets, std::size_t need,
                              std::chrono::milliseconds deadline,
                              std::function<Reply<T>(std::uint32_t)> call) {
  struct State {
    std::mutex mu;
    std::condition_variable cv;
    std::vector<Reply<T>> replies;
    std::size_t ok = 0;
  };
  auto state = std::make_shared<State>();
  for (std::uint32_t index : targets) {
    std::thread([state, call, index] {
      Reply<T> reply = call(index);
      std::lock_guard lock(state->mu);
      if (reply.status == ReplyStatus::kOk) ++state->ok;
      state->replies.push_back(std::move(reply));
      state->cv.notify_all();
    }).detach();
  }

  const auto until = std::chrono::steady_clock::now() + deadline;
  std::unique_lock lock(state->mu);
  state->cv.wait_until(lock, until, [&] { return state->ok >= need || state->replies.size() == targets.size(); });
  std::vector<Reply<T>> out = state->replies;
  const ReplyStatus silent = state->ok >= need ? ReplyStatus::kPending : ReplyStatus::kUnreachable;
  lock.unlock();

  for (std::uint32_t index : targets) {
    const bool answered = std::any_of(out.begin(), out.end(), [&](const Reply<T>& r) { return r.index == index; });
    if (!answered) out.push_back({index, silent, std::nullopt});
  }
  return out;
}

// Runs a transport call and maps failures onto reply statuses. `decode`
// turns a response into a reply and may throw EncodingError for garbage.
template <typename T>
std::function<Reply<T>(std::uint32_t)> make_call(
    std::shared_ptr<Transport> transport, const ModeratorRoster& roster, std::string_view path,
    std::function<std::string(std::uint32_t)> body_for, std::chrono::milliseconds timeout,
    std::function<Reply<T>(std::uint32_t, const TransportResponse&)> decode) {
  std::vector<std::string> addresses;
  for (const auto& m : roster.moderators) addresses.push_back(m.address);
  return [transport, addresses = std::move(addresses), path = std::string(path), body_for = std::move(body_for),
          timeout, decode = std::move(decode)](std::uint32_t index) -> Reply<T> {
    try {
      const TransportResponse response = transport->post(addresses[index - 1], path, body_for(index), timeout);
      return decode(index, response);
    } catch (const TransportError&) {
      return {index, ReplyStatus::kUnreachable, std::nullopt};
    } catch (const std::exception&) {
      return {index, ReplyStatus::kFaulty, std::nullopt};
    }
  };
}

std::vector<std::uint32_t> sorted(std::set<std::uint32_t> s) { return {s.begin(), s.end()}; }

}  // namespace

TokenIssuanceError::TokenIssuanceError(std::vector<std::uint32_t> unreachable, std::vector<std::uint32_t> faulty)
    : Error([&] {
        auto join = [](const std::vector<std::uint32_t>& v) {
          std::string s;
          for (auto i : v) s += (s.empty() ? "" : ",") + std::to_string(i);
          return s.empty() ? std::string("none") : s;
        };
        return "token issuance failed: unreachable moderators [" + join(unreachable) + "], faulty moderators [" +
               join(faulty) + "]";
      }()),
      unreachable_(std::move(unreachable)),
      faulty_(std::move(faulty)) {}

Client::Client(ModeratorRoster roster, std::shared_ptr<Transport> transport, ClientOptions options)
    : roster_(std::move(roster)), transport_(std::move(transport)), options_(options) {
  roster_.params.validate();
  if (roster_.moderators.size() != roster_.params.n) throw InvalidArgument("roster size does not match n");
}

std::vector<IssuedToken> Client::obtain_tokens(const TokenBatchRequest& batch, const UnixClock& clock, Rng& rng) {
  if (batch.batch_size < 1) throw InvalidArgument("batch size must be at least 1");
  const Suite& suite = *roster_.suite;
  const std::uint32_t k = roster_.params.k;
  const std::size_t count = batch.batch_size;

  std::vector<PendingToken> pending;
  std::vector<TokenRequest> requests;
  pending.reserve(count);
  requests.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    pending.push_back(begin_token(batch.id_src, roster_.keys.encryption_pk, clock, rng));
    requests.push_back(pending.back().request);
  }
  const auto round1_body = std::make_shared<const std::string>(wire::encode_round1_request(requests));
  const std::vector<GroupElement> vshares = roster_.verification_shares();

  std::set<std::uint32_t> excluded;
  std::set<std::uint32_t> unreachable;
  std::set<std::uint32_t> faulty;

  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    std::vector<std::uint32_t> targets;
    for (std::uint32_t i = 1; i <= roster_.params.n; ++i) {
      if (!excluded.count(i)) targets.push_back(i);
    }
    if (targets.size() < k) break;

    // Round 1: every candidate checks the batch and commits to nonces.
    using Round1Batch = std::vector<wire::Round1Accepted>;
    auto round1 = fan_out<Round1Batch>(
        targets, k, options_.deadline,
        make_call<Round1Batch>(
            transport_, roster_, wire::kRound1Path, [round1_body](std::uint32_t) { return *round1_body; },
            options_.deadline, [sp = &suite, count](std::uint32_t index, const TransportResponse& resp) {
              Reply<Round1Batch> reply{index, ReplyStatus::kFaulty, std::nullopt};
              if (resp.status != 200) return reply;
              auto results = wire::decode_round1_response(*sp, resp.body);
              if (results.size() != count) return reply;
              Round1Batch accepted;
              for (auto& r : results) {
                auto* ok = std::get_if<wire::Round1Accepted>(&r);
                if (!ok || ok->commitment.index != index) return reply;
                accepted.push_back(*ok);
              }
              return Reply<Round1Batch>{index, ReplyStatus::kOk, std::move(accepted)};
            }));

    std::vector<Reply<Round1Batch>> chosen;
    unreachable.clear();
    for (auto& r : round1) {
      if (r.status == ReplyStatus::kOk && chosen.size() < k) chosen.push_back(std::move(r));
      else if (r.status == ReplyStatus::kUnreachable) unreachable.insert(r.index);
      else if (r.status == ReplyStatus::kFaulty) faulty.insert(r.index);
    }
    if (chosen.size() < k) break;

    // Round 2: the chosen k sign each token against the same k-member roster.
    std::vector<std::vector<NonceCommitment>> rosters(count);
    for (std::size_t t = 0; t < count; ++t) {
      for (const auto& c : chosen) rosters[t].push_back(c.value->at(t).commitment);
    }
    auto bodies = std::make_shared<std::map<std::uint32_t, std::string>>();
    std::vector<std::uint32_t> signers;
    for (const auto& c : chosen) {
      std::vector<wire::Round2Item> items;
      items.reserve(count);
      for (std::size_t t = 0; t < count; ++t) items.push_back({c.value->at(t).session_id, rosters[t]});
      (*bodies)[c.index] = wire::encode_round2_request(items);
      signers.push_back(c.index);
    }

    using Round2Batch = std::vector<SignatureShare>;
    auto round2 = fan_out<Round2Batch>(
        signers, k, options_.deadline,
        make_call<Round2Batch>(
            transport_, roster_, wire::kRound2Path, [bodies](std::uint32_t index) { return bodies->at(index); },
            options_.deadline, [sp = &suite, count](std::uint32_t index, const TransportResponse& resp) {
              Reply<Round2Batch> reply{index, ReplyStatus::kFaulty, std::nullopt};
              if (resp.status != 200) return reply;
              auto results = wire::decode_round2_response(*sp, resp.body);
              if (results.size() != count) return reply;
              Round2Batch shares;
              for (auto& r : results) {
                auto* share = std::get_if<SignatureShare>(&r);
                if (!share || share->index != index) return reply;
                shares.push_back(*share);
              }
              return Reply<Round2Batch>{index, ReplyStatus::kOk, std::move(shares)};
            }));

    std::map<std::uint32_t, Round2Batch> shares_by_signer;
    bool round2_ok = true;
    for (auto& r : round2) {
      if (r.status == ReplyStatus::kOk) {
        shares_by_signer[r.index] = std::move(*r.value);
        continue;
      }
      round2_ok = false;
      excluded.insert(r.index);
      (r.status == ReplyStatus::kUnreachable ? unreachable : faulty).insert(r.index);
    }
    if (!round2_ok) continue;

    try {
      std::vector<IssuedToken> out;
      out.reserve(count);
      for (std::size_t t = 0; t < count; ++t) {
        std::vector<SignatureShare> shares;
        for (auto index : signers) shares.push_back(shares_by_signer.at(index)[t]);
        out.push_back({finalize_token(pending[t].request, rosters[t], shares, roster_.keys.signing_pk, vshares, k),
                       pending[t].sk_eph});
      }
      return out;
    } catch (const FinalizeError& e) {
      if (e.indices().empty()) throw;
      for (auto i : e.indices()) {
        faulty.insert(i);
        excluded.insert(i);
      }
    }
  }
  throw TokenIssuanceError(sorted(unreachable), sorted(faulty));
}

ReportOutcome Client::report_and_recover(const MessageEnvelope& envelope) {
  const Suite& suite = *roster_.suite;
  const ReportRequest report{envelope};
  const auto body = std::make_shared<const std::string>(wire::encode_report_request(report));

  std::vector<std::uint32_t> targets;
  for (const auto& m : roster_.moderators) targets.push_back(m.index);

  auto replies = fan_out<DecryptionShare>(
      targets, roster_.params.k, options_.deadline,
      make_call<DecryptionShare>(
          transport_, roster_, wire::kReportPath, [body](std::uint32_t) { return *body; }, options_.deadline,
          [sp = &suite](std::uint32_t index, const TransportResponse& resp) -> Reply<DecryptionShare> {
            if (resp.status == 422) return {index, ReplyStatus::kRejected, std::nullopt};
            if (resp.status != 200) return {index, ReplyStatus::kFaulty, std::nullopt};
            auto result = wire::decode_report_response(*sp, resp.body);
            if (std::holds_alternative<wire::Denied>(result)) return {index, ReplyStatus::kDenied, std::nullopt};
            auto share = std::get<DecryptionShare>(result);
            if (share.index != index) return {index, ReplyStatus::kFaulty, std::nullopt};
            return {index, ReplyStatus::kOk, share};
          }));

  ReportOutcome outcome;
  std::vector<DecryptionShare> shares;
  for (const auto& r : replies) {
    switch (r.status) {
      case ReplyStatus::kOk:
        shares.push_back(*r.value);
        outcome.approved.push_back(r.index);
        break;
      case ReplyStatus::kDenied:
        outcome.denied.push_back(r.index);
        break;
      case ReplyStatus::kRejected:
        outcome.rejected.push_back(r.index);
        break;
      case ReplyStatus::kUnreachable:
        outcome.unreachable.push_back(r.index);
        break;
      case ReplyStatus::kFaulty:
        outcome.faulty.push_back(r.index);
        break;
      case ReplyStatus::kPending:
        break;
    }
  }
  for (auto* v : {&outcome.approved, &outcome.denied, &outcome.rejected, &outcome.unreachable, &outcome.faulty}) {
    std::sort(v->begin(), v->end());
  }
  outcome.approvals = shares.size();
  if (shares.size() >= roster_.params.k) {
    shares.erase(shares.begin() + roster_.params.k, shares.end());
    outcome.identity = recover_identity(report, shares, roster_.params);
  }
  return outcome;
}

}  // namespace cerberus
