#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace eed {

// FNV-1a over bytes; used to derive named RNG sub-streams and file digests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// One user-facing seed fans out into independent named streams ("init",
// "sampling", "svd", "kmeans", ...). An optional index separates repeated
// draws from the same stream (per trial, per epoch, per split).
inline std::mt19937_64 substream(std::uint64_t seed, std::string_view name,
                                 std::uint64_t index = 0) {
  const std::uint64_t tag = fnv1a64(name);
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(tag),  static_cast<std::uint32_t>(tag >> 32),
      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace eed
