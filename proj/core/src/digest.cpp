#include "elrag/digest.hpp"

#include <openssl/sha.h>

#include <array>

namespace elrag {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest.data());
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(digest.size() * 2);
  for (unsigned char b : digest) {
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 0x0f]);
  }
  return out;
}

std::string sha256_hex16(std::string_view data) {
  return sha256_hex(data).substr(0, 16);
}

std::uint64_t seeded_hash64(std::string_view data, std::uint64_t seed) {
  // FNV-1a with the seed folded into the offset basis.
  std::uint64_t h = 14695981039346656037ull ^ (seed * 0x9e3779b97f4a7c15ull);
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  // splitmix64 finalizer; FNV alone leaves the high bits weak.
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ull;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebull;
  h ^= h >> 31;
  return h;
}

}  // namespace elrag
