#include "cerberus/hash.hpp"

#include <openssl/evp.h>

#include <memory>

namespace cerberus {

Bytes xof(std::string_view domain_tag, ByteView input, std::size_t out_len) {
  if (out_len == 0) throw InvalidArgument("xof output length must be positive");
  if (domain_tag.size() > 255) throw InvalidArgument("xof domain tag too long");

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  const auto tag_len = static_cast<unsigned char>(domain_tag.size());
  Bytes out(out_len);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_shake256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), &tag_len, 1) != 1 ||
      EVP_DigestUpdate(ctx.get(), domain_tag.data(), domain_tag.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), input.data(), input.size()) != 1 ||
      EVP_DigestFinalXOF(ctx.get(), out.data(), out.size()) != 1) {
    throw Error("SHAKE256 evaluation failed");
  }
  return out;
}

Scalar hash_to_scalar(const Suite& suite, std::string_view domain_tag, ByteView input) {
  return suite.reduce_wide(xof(domain_tag, input, 64));
}

}  // namespace cerberus
