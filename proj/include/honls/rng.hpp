#pragma once

#include <complex>
#include <cstdint>

namespace honls::rng {

// Counter-based generator: value i of a stream is a pure function of
// (seed, i), so any language can reproduce the sequence.  The mixer is
// splitmix64 applied to seed + i * golden-gamma.
inline std::uint64_t at(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1).
inline double uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(at(seed, counter) >> 11) * 0x1.0p-53;
}

// Uniform integer in [lo, hi] (inclusive).
inline long long uniform_int(std::uint64_t seed, std::uint64_t counter,
                             long long lo, long long hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long long>(at(seed, counter) % span);
}

inline std::complex<double> uniform_complex(std::uint64_t seed,
                                            std::uint64_t counter) {
  return {2.0 * uniform(seed, 2 * counter) - 1.0,
          2.0 * uniform(seed, 2 * counter + 1) - 1.0};
}

}  // namespace honls::rng
