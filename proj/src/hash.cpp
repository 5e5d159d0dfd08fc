// SPDX-License-Identifier: Apache-2.0

#include "subwave/hash.hpp"

#include <array>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <openssl/evp.h>

namespace subwave
{

namespace
{

struct Digest
{
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

  Digest()
  {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    {
      throw std::runtime_error("SHA-256 initialisation failed");
    }
  }
  void Update(const void *data, std::size_t n)
  {
    if (EVP_DigestUpdate(ctx.get(), data, n) != 1)
    {
      throw std::runtime_error("SHA-256 update failed");
    }
  }
  std::string Hex()
  {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
    {
      throw std::runtime_error("SHA-256 finalisation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i)
    {
      out.push_back(kHex[md[i] >> 4]);
      out.push_back(kHex[md[i] & 0xf]);
    }
    return out;
  }
};

}  // namespace

std::string Sha256Hex(std::string_view data)
{
  Digest d;
  d.Update(data.data(), data.size());
  return d.Hex();
}

std::string Sha256FileHex(const std::string &path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is)
  {
    throw std::runtime_error("cannot open " + path + " for hashing");
  }
  Digest d;
  std::array<char, 1 << 16> buf{};
  while (is)
  {
    is.read(buf.data(), buf.size());
    d.Update(buf.data(), static_cast<std::size_t>(is.gcount()));
  }
  return d.Hex();
}

}  // namespace subwave
