#ifndef REBLUR_DATA_RANDOM_H_
#define REBLUR_DATA_RANDOM_H_

#include <cstdint>
#include <random>

namespace reblur {

// The standard library fixes mt19937_64's output sequence but not the
// distributions built on it, so the draws below are spelled out to keep
// results identical across toolchains.

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for an independent stream identified by (seed, stream).
inline std::uint64_t StreamSeed(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(SplitMix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL));
}

// Uniform in [0,1).
inline double UniformDouble(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double UniformDouble(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * UniformDouble(gen);
}

// Uniform in [0, n), rejection sampled. n must be positive.
inline std::uint64_t UniformIndex(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = gen();
  } while (v >= limit);
  return v % n;
}

}  // namespace reblur

#endif  // REBLUR_DATA_RANDOM_H_
