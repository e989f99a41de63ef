#pragma once

#include <cstdint>
#include <string_view>

namespace permugibbs {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform in [0, 1) keyed by (seed, stream, counter); no state.
inline double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const std::uint64_t h =
      splitmix64(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL)) ^ counter);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// 64-bit FNV-1a; stable across platforms, used for seeds and manifests.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Per-job seed from a master seed and a stable job name.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view job) {
  return splitmix64(master ^ fnv1a(job));
}

inline std::uint64_t chain_seed(std::uint64_t seed, std::uint64_t chain) {
  return splitmix64(seed + 0x632be59bd9b4e019ULL * (chain + 1));
}

}  // namespace permugibbs
