#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace elrag {

/// Hex-encoded SHA-256 of the input bytes.
std::string sha256_hex(std::string_view data);

/// First 16 hex digits of sha256_hex; used for stable content-derived ids
/// and config fingerprints.
std::string sha256_hex16(std::string_view data);

/// Deterministic seeded 64-bit string hash (FNV-1a core with an avalanche
/// finalizer). Stable across platforms, unlike std::hash.
std::uint64_t seeded_hash64(std::string_view data, std::uint64_t seed);

}  // namespace elrag
