#pragma once

#include <cstdint>

namespace layoutlab {

/// splitmix64: used to expand one user seed into stream/state seeds.
/// Reference: Vigna, http://prng.di.unimi.it/splitmix64.c
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// PCG32 (PCG-XSH-RR 64/32). Small, fast, and fully specified here so the
/// same seed produces the same stream on every platform and stdlib.
/// Reference: O'Neill, "PCG: A Family of Simple Fast Space-Efficient
/// Statistically Good Algorithms for Random Number Generation".
class Pcg32 {
 public:
  Pcg32() : Pcg32(0x853c49e6748fea9bULL, 0xda3e39cb94b95bdbULL) {}

  Pcg32(std::uint64_t seed, std::uint64_t stream = 0xda3e39cb94b95bdbULL) {
    state_ = 0;
    inc_ = (stream << 1u) | 1u;
    next_u32();
    state_ += seed;
    next_u32();
  }

  /// Derive an independent generator for sub-task `index` of run `seed`.
  /// Instances drawn this way do not change when their neighbours do.
  static Pcg32 derive(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ 0x5851f42d4c957f2dULL;
    std::uint64_t mixed = splitmix64(s);
    std::uint64_t t = index + 0x9e3779b97f4a7c15ULL;
    std::uint64_t stream = splitmix64(t) ^ mixed;
    std::uint64_t u = mixed + index;
    return Pcg32(splitmix64(u), stream);
  }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    std::uint32_t xorshifted =
        static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
  }

  /// Unbiased integer in [0, bound) via Lemire-style rejection.
  std::uint32_t next_below(std::uint32_t bound) {
    if (bound <= 1) return 0;
    // Reject the tail so every value is equally likely.
    std::uint32_t threshold = (0u - bound) % bound;
    for (;;) {
      std::uint32_t r = next_u32();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 0;
};

}  // namespace layoutlab
