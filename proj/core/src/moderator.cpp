#include "cerberus/moderator.hpp"

#include <fstream>
#include <iterator>

#include <json.hpp>

namespace cerberus {

// --- config ---------------------------------------------------------------

ModeratorConfig ModeratorConfig::parse(std::string_view json_text) {
  using nlohmann::json;
  const json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InvalidArgument("moderator config is not a JSON object");
  ModeratorConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "index") cfg.index = value.get<std::uint32_t>();
      else if (key == "listen") cfg.listen = value.get<std::string>();
      else if (key == "share_file") cfg.share_file = value.get<std::string>();
      else if (key == "policy") cfg.policy = value.get<std::string>();
      else if (key == "skew_secs") cfg.skew_secs = value.get<std::int64_t>();
      else if (key == "nonce_pool") cfg.nonce_pool = value.get<std::size_t>();
      else if (key == "session_ttl_secs") cfg.session_ttl_secs = value.get<std::int64_t>();
      else if (key == "auth_token") cfg.auth_token = value.get<std::string>();
      else throw InvalidArgument("unknown moderator config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("moderator config: ") + e.what());
  }
  return cfg;
}

ModeratorConfig ModeratorConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ModeratorConfig cfg = parse(text);
  // Relative share paths are resolved against the config file's directory.
  if (!cfg.share_file.empty() && cfg.share_file.is_relative()) cfg.share_file = path.parent_path() / cfg.share_file;
  return cfg;
}

void ModeratorConfig::validate() const {
  if (share_file.empty()) throw InvalidArgument("share_file is required");
  if (nonce_pool < 1) throw InvalidArgument("nonce_pool must be at least 1");
  if (skew_secs < 0) throw InvalidArgument("skew_secs must be non-negative");
  if (session_ttl_secs < 1) throw InvalidArgument("session_ttl_secs must be positive");
  if (listen.rfind(':') == std::string::npos) throw InvalidArgument("listen must be host:port");
  VotePolicy::parse(policy);
}

// --- sessions -------------------------------------------------------------

SessionStore::SessionStore(std::size_t capacity, std::chrono::seconds ttl, SteadyClock clock)
    : capacity_(capacity), ttl_(ttl), clock_(clock ? std::move(clock) : [] { return std::chrono::steady_clock::now(); }) {}

std::optional<wire::SessionId> SessionStore::open(TokenRequest request, SigningNonces nonces, Rng& rng) {
  wire::SessionId id{};
  rng.fill(id);
  const auto now = clock_();
  std::lock_guard lock(mu_);
  if (sessions_.size() >= capacity_) purge_locked(now);
  if (sessions_.size() >= capacity_) return std::nullopt;
  // 128-bit random ids; a collision means the entropy source is broken.
  auto [it, inserted] = sessions_.try_emplace(id, Session{Claim{std::move(request), std::move(nonces)}, now + ttl_});
  if (!inserted) throw EntropyError("session id collision");
  return id;
}

std::variant<SessionStore::Claim, SessionStore::TakeError> SessionStore::take(const wire::SessionId& id) {
  const auto now = clock_();
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return TakeError::kUnknown;
  if (it->second.expires <= now) {
    sessions_.erase(it);
    return TakeError::kUnknown;
  }
  if (!it->second.claim) return TakeError::kConsumed;
  Claim claim = std::move(*it->second.claim);
  it->second.claim.reset();
  return claim;
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

void SessionStore::purge_expired() {
  const auto now = clock_();
  std::lock_guard lock(mu_);
  purge_locked(now);
}

void SessionStore::purge_locked(std::chrono::steady_clock::time_point now) {
  std::erase_if(sessions_, [now](const auto& kv) { return kv.second.expires <= now; });
}

// --- node -----------------------------------------------------------------

ModeratorNode::ModeratorNode(ModeratorShareFile keys, VotePolicy policy, Options options, UnixClock clock,
                             SessionStore::SteadyClock steady_clock)
    : keys_(std::move(keys)),
      policy_(std::move(policy)),
      options_(options),
      clock_(std::move(clock)),
      sessions_(options.nonce_pool, std::chrono::seconds(options.session_ttl_secs), std::move(steady_clock)) {}

wire::Round1Result ModeratorNode::handle_token_round1(const TokenRequest& request) {
  const RequestCheck check =
      moderator_check_token_request(request, keys_.keys.encryption_pk, clock_(), options_.skew_secs);
  if (check != RequestCheck::kAccept) return wire::Rejection{std::string(to_string(check))};

  Round1Output r1 = round1_commit(suite(), keys_.index, rng_);
  const NonceCommitment commitment = r1.commitment;
  auto id = sessions_.open(request, std::move(r1.nonces), rng_);
  if (!id) return wire::Rejection{"session-capacity"};
  return wire::Round1Accepted{*id, commitment};
}

wire::Round2Result ModeratorNode::handle_token_round2(const wire::SessionId& session_id,
                                                      std::span<const NonceCommitment> roster) {
  auto taken = sessions_.take(session_id);
  if (auto* err = std::get_if<SessionStore::TakeError>(&taken)) {
    return wire::Rejection{*err == SessionStore::TakeError::kConsumed ? "consumed-session" : "unknown-session"};
  }
  auto& claim = std::get<SessionStore::Claim>(taken);
  const TokenRequest& req = claim.request;
  try {
    return round2_sign(keys_.signing_key(), claim.nonces, token_transcript(req.x1, req.pk_eph, req.issued_at),
                       roster);
  } catch (const NonceReuseError&) {
    return wire::Rejection{"consumed-session"};
  } catch (const InvalidArgument&) {
    return wire::Rejection{"bad-roster"};
  }
}

VoteOutcome ModeratorNode::handle_report(const ReportRequest& report) const {
  return moderator_vote(report, keys_.decryption_key(), policy_, keys_.keys.signing_pk);
}

ModeratorNode::HttpReply ModeratorNode::dispatch(std::string_view path, std::string_view body) {
  try {
    if (path == wire::kRound1Path) {
      const auto requests = wire::decode_round1_request(suite(), body);
      std::vector<wire::Round1Result> results;
      results.reserve(requests.size());
      for (const auto& r : requests) results.push_back(handle_token_round1(r));
      return {200, wire::encode_round1_response(results)};
    }
    if (path == wire::kRound2Path) {
      const auto items = wire::decode_round2_request(suite(), body);
      std::vector<wire::Round2Result> results;
      results.reserve(items.size());
      for (const auto& item : items) results.push_back(handle_token_round2(item.session_id, item.roster));
      return {200, wire::encode_round2_response(results)};
    }
    if (path == wire::kReportPath) {
      const VoteOutcome vote = handle_report(wire::decode_report_request(suite(), body));
      switch (vote.kind) {
        case VoteOutcome::Kind::kShare:
          return {200, wire::encode_report_response(*vote.share)};
        case VoteOutcome::Kind::kDeny:
          return {200, wire::encode_report_response(wire::Denied{})};
        case VoteOutcome::Kind::kReject:
          return {422, wire::encode_error(to_string(vote.reason))};
      }
    }
    return {404, wire::encode_error("unknown-endpoint")};
  } catch (const wire::MalformedBody&) {
    return {400, wire::encode_error("malformed")};
  } catch (const std::exception&) {
    return {500, wire::encode_error("internal")};
  }
}

std::unique_ptr<ModeratorNode> make_moderator(const ModeratorConfig& config) {
  config.validate();
  ModeratorShareFile keys = ModeratorShareFile::load(config.share_file);
  if (config.index != 0 && config.index != keys.index) {
    throw InvalidArgument("config index " + std::to_string(config.index) + " does not match share file index " +
                          std::to_string(keys.index));
  }
  ModeratorNode::Options options{config.skew_secs, config.nonce_pool, config.session_ttl_secs};
  return std::make_unique<ModeratorNode>(std::move(keys), VotePolicy::parse(config.policy), options);
}

}  // namespace cerberus
