#ifndef SANET_RNG_H
#define SANET_RNG_H

#include <cstdint>
#include <random>

namespace sanet {

// The std distributions are implementation-defined, so draws go through
// these helpers to keep seeded streams identical across standard libraries.
using Rng = std::mt19937_64;

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed for the `index`-th independent stream derived from `seed`.
inline uint64_t DeriveSeed(uint64_t seed, uint64_t index) {
  return SplitMix64(SplitMix64(seed) ^ SplitMix64(index + 0x51ED270B27A4E5ull));
}

// Unbiased integer in [0, bound).
inline uint64_t UniformIndex(Rng& rng, uint64_t bound) {
  if (bound <= 1) return 0;
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t draw = 0;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

// Integer in [lo, hi] inclusive.
inline uint64_t UniformInRange(Rng& rng, uint64_t lo, uint64_t hi) {
  return lo + UniformIndex(rng, hi - lo + 1);
}

// Real in [0, 1).
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace sanet

#endif  // SANET_RNG_H
