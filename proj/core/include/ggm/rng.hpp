#pragma once

#include <cstdint>
#include <random>

namespace ggm {

// std::mt19937_64 is fully specified by the standard, so seeded streams are
// reproducible across platforms; distributions are drawn by hand for the same
// reason.
using Rng = std::mt19937_64;

/// Uniform double in the open interval (0, 1) from the top 53 bits.
inline double uniform_open01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based uniform in (0, 1): a pure function of (seed, i, j), so
/// Monte-Carlo sweeps give identical draws however the work is sharded.
inline double counter_uniform(std::uint64_t seed, std::uint64_t i,
                              std::uint64_t j) {
  const std::uint64_t h =
      splitmix64(splitmix64(splitmix64(seed) ^ i) + 0x632be59bd9b4e019ULL * j);
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

/// Unbiased index in [0, n) by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

}  // namespace ggm
