#pragma once

#include <cstdint>

namespace flexroc {

/// splitmix64 step; the project-wide PRNG primitive. Counter-based streams
/// built on it are deterministic and splittable: stream k of a seed starts
/// at state seed + (k + 1) * golden, so any sample can be generated
/// independently of the others.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_state(std::uint64_t seed, std::uint64_t stream) {
  return seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
}

inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = stream_state(a, b);
  return splitmix64(s);
}

/// Uniform double in [0, 1) from 64 random bits.
inline double to_unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

constexpr const char* kRngAlgorithm = "splitmix64-counter";

}  // namespace flexroc
