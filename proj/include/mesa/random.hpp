#pragma once

// Seed derivation for reproducible, order-independent random streams.
// Every realization gets its own engine seeded from (seed, index, purpose),
// so serial and parallel runs draw identical numbers.

#include <cstdint>
#include <random>

namespace mesa {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                    std::uint64_t purpose = 0) {
  return mix64(mix64(mix64(seed) ^ index) ^ (purpose * 0xd1b54a32d192ed03ULL));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t index = 0,
                          std::uint64_t purpose = 0) {
  return Engine(derive_seed(seed, index, purpose));
}

// Stream purposes, kept distinct so a model draw never reuses data noise.
namespace stream {
inline constexpr std::uint64_t data = 1;
inline constexpr std::uint64_t model = 2;
inline constexpr std::uint64_t forecast = 3;
inline constexpr std::uint64_t holdout = 4;
}  // namespace stream

}  // namespace mesa
