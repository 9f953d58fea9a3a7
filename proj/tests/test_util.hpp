#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cerberus/group.hpp"
#include "cerberus/keyfile.hpp"
#include "cerberus/protocol.hpp"

namespace cerberus::testing {

/// Discrete log by trial over the whole toy group.
inline std::optional<Scalar> brute_force_dlog(const GroupElement& x) {
  const Suite& suite = x.suite();
  for (std::uint64_t e = 0; e < 11; ++e) {
    if (suite.base_pow(suite.from_u64(e)) == x) return suite.from_u64(e);
  }
  return std::nullopt;
}

/// Calls `visit` with every size-`k` subset of {0, ..., n-1}.
inline void for_each_subset(std::size_t n, std::size_t k,
                            const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (pick.size() == k) {
      visit(pick);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
}

template <typename T>
std::vector<T> select(const std::vector<T>& all, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

/// Runs both signing rounds in-process with the moderators at positions
/// `pick` (0-based) and finalizes the token.
inline Token issue_locally(const DealtKeys& keys, const std::vector<std::size_t>& pick, const TokenRequest& req,
                           Rng& rng) {
  const Suite& suite = *keys.roster.suite;
  const Bytes msg = token_transcript(req.x1, req.pk_eph, req.issued_at);
  std::vector<SigningNonces> nonces;
  std::vector<NonceCommitment> roster;
  for (auto i : pick) {
    auto out = round1_commit(suite, keys.shares[i].index, rng);
    roster.push_back(out.commitment);
    nonces.push_back(std::move(out.nonces));
  }
  std::vector<SignatureShare> shares;
  for (std::size_t j = 0; j < pick.size(); ++j) {
    shares.push_back(round2_sign(keys.shares[pick[j]].signing_key(), nonces[j], msg, roster));
  }
  return finalize_token(req, roster, shares, keys.roster.keys.signing_pk, keys.roster.verification_shares(),
                        keys.roster.params.k);
}

}  // namespace cerberus::testing
