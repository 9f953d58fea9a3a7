#include "cerberus/shamir.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

namespace cerberus {

void ThresholdParams::validate() const {
  if (k < 1 || k > n || n > 0xffff) {
    throw InvalidArgument("invalid threshold parameters k=" + std::to_string(k) +
                          " n=" + std::to_string(n));
  }
}

std::vector<SecretShare> deal(const Scalar& secret, ThresholdParams params, Rng& rng) {
  params.validate();
  std::vector<Scalar> coefficients;
  coefficients.reserve(params.k - 1);
  for (std::uint32_t i = 1; i < params.k; ++i) coefficients.push_back(secret.suite().random_scalar(rng));
  return deal_with_coefficients(secret, coefficients, params.n);
}

std::vector<SecretShare> deal_with_coefficients(const Scalar& secret,
                                                std::span<const Scalar> coefficients,
                                                std::uint32_t n) {
  ThresholdParams{static_cast<std::uint32_t>(coefficients.size() + 1), n}.validate();
  const Suite& suite = secret.suite();
  std::vector<SecretShare> shares;
  shares.reserve(n);
  for (std::uint32_t index = 1; index <= n; ++index) {
    // Horner evaluation from the top coefficient down.
    const Scalar x = suite.from_u64(index);
    if (x.is_zero()) throw InvalidArgument("deal: n exceeds the group order");
    Scalar acc = suite.zero();
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
    acc = acc * x + secret;
    shares.push_back({index, acc});
  }
  return shares;
}

std::vector<Scalar> lagrange_at_zero(const Suite& suite, std::span<const std::uint32_t> indices) {
  if (indices.empty()) throw InvalidArgument("lagrange: empty index set");
  std::unordered_set<std::uint32_t> seen;
  for (std::uint32_t i : indices) {
    if (i == 0) throw InvalidArgument("lagrange: index 0 is reserved for the secret");
    if (!seen.insert(i).second) throw InvalidArgument("lagrange: duplicate index " + std::to_string(i));
  }

  const std::size_t m = indices.size();
  std::vector<Scalar> nums;
  std::vector<Scalar> dens;
  nums.reserve(m);
  dens.reserve(m);
  for (std::uint32_t i : indices) {
    Scalar num = suite.one();
    Scalar den = suite.one();
    const Scalar xi = suite.from_u64(i);
    for (std::uint32_t j : indices) {
      if (j == i) continue;
      const Scalar xj = suite.from_u64(j);
      num *= xj;
      den *= xj - xi;
    }
    // den is nonzero as long as indices are distinct mod q.
    if (den.is_zero()) throw InvalidArgument("lagrange: indices collide modulo the group order");
    nums.push_back(num);
    dens.push_back(den);
  }

  // Batch inversion: one field inversion for the whole set.
  std::vector<Scalar> prefix;
  prefix.reserve(m);
  Scalar acc = suite.one();
  for (const auto& d : dens) {
    prefix.push_back(acc);
    acc *= d;
  }
  Scalar inv = acc.inverse();
  std::vector<Scalar> out(nums);
  for (std::size_t t = m; t-- > 0;) {
    out[t] = nums[t] * inv * prefix[t];
    inv *= dens[t];
  }
  return out;
}

Scalar reconstruct(std::span<const SecretShare> shares) {
  if (shares.empty()) throw InvalidArgument("reconstruct: no shares");
  const Suite& suite = shares.front().value.suite();
  std::vector<std::uint32_t> indices;
  indices.reserve(shares.size());
  for (const auto& s : shares) indices.push_back(s.index);
  const auto lambdas = lagrange_at_zero(suite, indices);
  Scalar acc = suite.zero();
  for (std::size_t i = 0; i < shares.size(); ++i) acc += lambdas[i] * shares[i].value;
  return acc;
}

}  // namespace cerberus
