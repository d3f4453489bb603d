#pragma once

#include <cstdint>
#include <string_view>

namespace chemreward {

/// Identifier of the stable hash family below. Persisted stores record it;
/// bump it whenever mix64/combine64 change.
inline constexpr std::string_view kHashVersion = "splitmix64-v1";

/// SplitMix64 finalizer. Pure integer arithmetic, identical on every platform.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t combine64(std::uint64_t seed, std::uint64_t value) noexcept {
  return mix64(seed ^ (mix64(value) + 0x632be59bd9b4e019ULL + (seed << 6) + (seed >> 2)));
}

/// FNV-1a over raw bytes; used for content digests (provenance, stores).
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace chemreward
