#pragma once

#include <cstdint>

namespace oscnet {

// Finalizer from the splitmix64 generator. Bijective on 64-bit words, so
// distinct inputs never collide.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent seed for a named stream from one master seed.
/// Every consumer of randomness owns a distinct stream id so that reusing a
/// master seed elsewhere never replays the same draws.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(master + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

// Stream ids. Keep stable: results are reproducible across versions only if
// these never change.
inline constexpr std::uint64_t kStreamInitialState = 1;
inline constexpr std::uint64_t kStreamNoise = 2;
inline constexpr std::uint64_t kStreamNoisePerOsc = 3;
inline constexpr std::uint64_t kStreamDetune = 4;
inline constexpr std::uint64_t kStreamRunBase = 100;

}  // namespace oscnet
