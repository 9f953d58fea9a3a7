#include "cerberus/schnorr.hpp"

#include <gtest/gtest.h>

#include "cerberus/shamir.hpp"
#include "test_util.hpp"

namespace cerberus {
namespace {

const Suite& toy = Suite::toy23();
const Suite& prod = Suite::ristretto255();

struct Signers {
  Scalar sk;
  GroupElement pk;
  std::vector<SigningKeyShare> keys;
};

Signers make_signers(const Suite& suite, ThresholdParams params, Rng& rng) {
  const Scalar sk = suite.random_nonzero_scalar(rng);
  const GroupElement pk = suite.base_pow(sk);
  std::vector<SigningKeyShare> keys;
  for (const auto& s : deal(sk, params, rng)) keys.push_back({s.index, s.value, pk, suite.base_pow(s.value)});
  return {sk, pk, std::move(keys)};
}

Signature threshold_sign(const Signers& g, const std::vector<std::size_t>& pick, ByteView msg, Rng& rng) {
  std::vector<SigningNonces> nonces;
  std::vector<NonceCommitment> roster;
  for (auto i : pick) {
    auto out = round1_commit(g.pk.suite(), g.keys[i].index, rng);
    roster.push_back(out.commitment);
    nonces.push_back(std::move(out.nonces));
  }
  std::vector<SignatureShare> shares;
  for (std::size_t j = 0; j < pick.size(); ++j) {
    shares.push_back(round2_sign(g.keys[pick[j]], nonces[j], msg, roster));
    EXPECT_TRUE(verify_share(roster, shares.back().index, shares.back(), msg, g.keys[pick[j]].verification_share, g.pk));
  }
  return aggregate(roster, shares, msg, g.pk);
}

TEST(Frost, SingleSignerThreshold) {
  SeededRng rng(20);
  const auto g = make_signers(prod, {1, 1}, rng);
  const Bytes msg = bytes_of("hello");
  EXPECT_TRUE(verify(g.pk, msg, threshold_sign(g, {0}, msg, rng)));
}

TEST(Frost, EveryKSubsetSigns) {
  SeededRng rng(21);
  for (const Suite* suite : {&toy, &prod}) {
    for (auto [k, n] : {std::pair{2u, 3u}, {3u, 5u}}) {
      const auto g = make_signers(*suite, {k, n}, rng);
      const Bytes msg = bytes_of("subset " + std::to_string(n));
      testing::for_each_subset(n, k, [&](const std::vector<std::size_t>& pick) {
        EXPECT_TRUE(verify(g.pk, msg, threshold_sign(g, pick, msg, rng)));
      });
    }
  }
}

TEST(Frost, DifferentSubsetsBothVerify) {
  SeededRng rng(22);
  const auto g = make_signers(prod, {2, 3}, rng);
  const Bytes msg = bytes_of("m");
  const auto a = threshold_sign(g, {0, 1}, msg, rng);
  const auto b = threshold_sign(g, {0, 2}, msg, rng);
  EXPECT_TRUE(verify(g.pk, msg, a));
  EXPECT_TRUE(verify(g.pk, msg, b));
  EXPECT_FALSE(a == b);
}

TEST(Frost, PerturbedSignatureFails) {
  SeededRng rng(23);
  const auto g = make_signers(prod, {2, 3}, rng);
  const Bytes msg = bytes_of("m");
  const auto sig = threshold_sign(g, {1, 2}, msg, rng);
  EXPECT_FALSE(verify(g.pk, msg, Signature{sig.R, sig.z + prod.one()}));
  EXPECT_FALSE(verify(g.pk, msg, Signature{sig.R * prod.generator(), sig.z}));
  EXPECT_FALSE(verify(g.pk, bytes_of("n"), sig));
  EXPECT_FALSE(verify(prod.base_pow(g.sk + prod.one()), msg, sig));
  EXPECT_FALSE(verify(prod.identity(), msg, sig));
}

TEST(Frost, EveryBitFlipOfWireSignatureFails) {
  SeededRng rng(24);
  const auto g = make_signers(prod, {2, 3}, rng);
  const Bytes msg = bytes_of("m");
  const Bytes wire = threshold_sign(g, {0, 2}, msg, rng).to_bytes();
  ASSERT_EQ(wire.size(), Signature::wire_size(prod));
  for (std::size_t bit = 0; bit < wire.size() * 8; ++bit) {
    Bytes bad = wire;
    bad[bit / 8] ^= static_cast<std::uint8_t>(1U << (bit % 8));
    bool accepted = false;
    try {
      accepted = verify(g.pk, msg, Signature::from_bytes(prod, bad));
    } catch (const EncodingError&) {
    }
    EXPECT_FALSE(accepted) << "bit " << bit;
  }
}

TEST(Frost, NonceReuseIsRefused) {
  SeededRng rng(25);
  const auto g = make_signers(prod, {2, 3}, rng);
  auto a = round1_commit(prod, 1, rng);
  auto b = round1_commit(prod, 2, rng);
  const std::vector<NonceCommitment> roster{a.commitment, b.commitment};
  const Bytes msg = bytes_of("m");
  EXPECT_FALSE(a.nonces.consumed());
  round2_sign(g.keys[0], a.nonces, msg, roster);
  EXPECT_TRUE(a.nonces.consumed());
  EXPECT_THROW(round2_sign(g.keys[0], a.nonces, msg, roster), NonceReuseError);
  EXPECT_THROW(round2_sign(g.keys[0], a.nonces, bytes_of("other"), roster), NonceReuseError);
}

TEST(Frost, NoncesAreBurntOnFailure) {
  SeededRng rng(26);
  const auto g = make_signers(prod, {2, 3}, rng);
  auto a = round1_commit(prod, 1, rng);
  auto b = round1_commit(prod, 2, rng);
  const std::vector<NonceCommitment> without_me{b.commitment};
  EXPECT_THROW(round2_sign(g.keys[0], a.nonces, bytes_of("m"), without_me), InvalidArgument);
  EXPECT_TRUE(a.nonces.consumed());
}

TEST(Frost, AlteredOwnCommitmentIsRefused) {
  SeededRng rng(27);
  const auto g = make_signers(prod, {2, 3}, rng);
  auto a = round1_commit(prod, 1, rng);
  auto b = round1_commit(prod, 2, rng);
  NonceCommitment forged = a.commitment;
  forged.binding = forged.binding * prod.generator();
  const std::vector<NonceCommitment> roster{forged, b.commitment};
  EXPECT_THROW(round2_sign(g.keys[0], a.nonces, bytes_of("m"), roster), InvalidArgument);
}

TEST(Frost, RosterEncodingIsOrderIndependent) {
  SeededRng rng(28);
  auto a = round1_commit(prod, 3, rng);
  auto b = round1_commit(prod, 1, rng);
  const std::vector<NonceCommitment> ab{a.commitment, b.commitment};
  const std::vector<NonceCommitment> ba{b.commitment, a.commitment};
  EXPECT_EQ(encode_roster(ab), encode_roster(ba));
  EXPECT_EQ(encode_roster(ab).size(), 2 * (4 + 32 + 32));
  EXPECT_EQ(group_commitment(ab, bytes_of("x")), group_commitment(ba, bytes_of("x")));
  const std::vector<NonceCommitment> dup{a.commitment, a.commitment};
  EXPECT_THROW(encode_roster(dup), InvalidArgument);
  EXPECT_THROW(encode_roster(std::span<const NonceCommitment>{}), InvalidArgument);
}

TEST(Frost, BindingFactorDependsOnEverything) {
  const Bytes roster = bytes_of("roster");
  const Scalar base = binding_factor(prod, 1, bytes_of("msg"), roster);
  EXPECT_FALSE(base == binding_factor(prod, 2, bytes_of("msg"), roster));
  EXPECT_FALSE(base == binding_factor(prod, 1, bytes_of("msh"), roster));
  EXPECT_FALSE(base == binding_factor(prod, 1, bytes_of("msg"), bytes_of("rostes")));
  // The length prefix separates message bytes from roster bytes.
  EXPECT_FALSE(binding_factor(prod, 1, bytes_of("ab"), bytes_of("c")) ==
               binding_factor(prod, 1, bytes_of("a"), bytes_of("bc")));
}

TEST(Frost, BadShareIsDetected) {
  SeededRng rng(29);
  const auto g = make_signers(prod, {2, 3}, rng);
  auto a = round1_commit(prod, 1, rng);
  auto b = round1_commit(prod, 3, rng);
  const std::vector<NonceCommitment> roster{a.commitment, b.commitment};
  const Bytes msg = bytes_of("m");
  auto sa = round2_sign(g.keys[0], a.nonces, msg, roster);
  auto sb = round2_sign(g.keys[2], b.nonces, msg, roster);
  EXPECT_TRUE(verify_share(roster, 1, sa, msg, g.keys[0].verification_share, g.pk));
  EXPECT_TRUE(verify_share(roster, 3, sb, msg, g.keys[2].verification_share, g.pk));
  EXPECT_FALSE(verify_share(roster, 3, sb, msg, g.keys[1].verification_share, g.pk));
  EXPECT_FALSE(verify_share(roster, 2, sb, msg, g.keys[2].verification_share, g.pk));

  sb.z += prod.one();
  EXPECT_FALSE(verify_share(roster, 3, sb, msg, g.keys[2].verification_share, g.pk));
  const std::vector<SignatureShare> shares{sa, sb};
  EXPECT_FALSE(verify(g.pk, msg, aggregate(roster, shares, msg, g.pk)));
}

TEST(Frost, AggregateNeedsOneSharePerRosterMember) {
  SeededRng rng(30);
  const auto g = make_signers(prod, {2, 3}, rng);
  auto a = round1_commit(prod, 1, rng);
  auto b = round1_commit(prod, 2, rng);
  const std::vector<NonceCommitment> roster{a.commitment, b.commitment};
  const Bytes msg = bytes_of("m");
  const auto sa = round2_sign(g.keys[0], a.nonces, msg, roster);
  const std::vector<SignatureShare> one{sa};
  EXPECT_THROW(aggregate(roster, one, msg, g.pk), InvalidArgument);
  const std::vector<SignatureShare> twice{sa, sa};
  EXPECT_THROW(aggregate(roster, twice, msg, g.pk), InvalidArgument);
}

TEST(Frost, VerifyAndAggregateNamesBadShares) {
  SeededRng rng(33);
  const auto g = make_signers(prod, {3, 5}, rng);
  std::vector<GroupElement> vshares;
  for (const auto& k : g.keys) vshares.push_back(k.verification_share);
  const Bytes msg = bytes_of("batch");
  std::vector<SigningNonces> nonces;
  std::vector<NonceCommitment> roster;
  for (std::size_t i : {4, 0, 2}) {
    auto out = round1_commit(prod, g.keys[i].index, rng);
    roster.push_back(out.commitment);
    nonces.push_back(std::move(out.nonces));
  }
  std::vector<SignatureShare> shares;
  for (std::size_t j = 0; j < 3; ++j) shares.push_back(round2_sign(g.keys[roster[j].index - 1], nonces[j], msg, roster));

  const auto good = verify_and_aggregate(roster, shares, msg, vshares, g.pk);
  ASSERT_TRUE(good.signature.has_value());
  EXPECT_TRUE(good.invalid.empty());
  EXPECT_TRUE(verify(g.pk, msg, *good.signature));
  EXPECT_EQ(*good.signature, aggregate(roster, shares, msg, g.pk));

  shares[0].z += prod.one();
  shares[2].z += prod.one();
  const auto bad = verify_and_aggregate(roster, shares, msg, vshares, g.pk);
  EXPECT_FALSE(bad.signature.has_value());
  EXPECT_EQ(bad.invalid, (std::vector<std::uint32_t>{5, 3}));
}

TEST(Schnorr, SingleSignerAndCrossVerify) {
  SeededRng rng(31);
  const Scalar sk = prod.random_nonzero_scalar(rng);
  const Bytes msg = bytes_of("single");
  const auto sig = sign_single(sk, msg, rng);
  EXPECT_TRUE(verify(prod.base_pow(sk), msg, sig));
  EXPECT_FALSE(verify(prod.base_pow(sk), bytes_of("other"), sig));

  // A threshold signature and a single-signer signature under the same
  // secret are checked by the same verifier.
  Signers g{sk, prod.base_pow(sk), {}};
  for (const auto& s : deal(sk, {2, 3}, rng)) g.keys.push_back({s.index, s.value, g.pk, prod.base_pow(s.value)});
  EXPECT_TRUE(verify(g.pk, msg, threshold_sign(g, {1, 2}, msg, rng)));
}

TEST(Schnorr, ToyChallengeGolden) {
  // Values from tests/oracles/golden_vectors.py.
  EXPECT_EQ(challenge(toy.identity(), toy.generator(), {}), toy.from_u64(1));
  EXPECT_EQ(challenge(toy.decode_element(Bytes{9}), toy.decode_element(Bytes{4}), bytes_of("abc")), toy.from_u64(4));
}

TEST(Signature, WireRoundTrip) {
  SeededRng rng(32);
  const auto sig = sign_single(prod.random_nonzero_scalar(rng), bytes_of("x"), rng);
  EXPECT_EQ(Signature::from_bytes(prod, sig.to_bytes()), sig);
  EXPECT_THROW(Signature::from_bytes(prod, Bytes(63)), EncodingError);
  Bytes high_z = sig.to_bytes();
  std::fill(high_z.begin() + 32, high_z.end(), 0xff);
  EXPECT_THROW(Signature::from_bytes(prod, high_z), EncodingError);
}

}  // namespace
}  // namespace cerberus
