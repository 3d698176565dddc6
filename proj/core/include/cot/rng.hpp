#pragma once

#include <cstdint>

namespace cot {

// Counter-based generator: the k-th draw of stream s under seed x is
// splitmix64(key(x, s) + k * golden), with key(x, s) = splitmix64(x ^ splitmix64(s + 1)).
// Any draw can be recomputed independently, so arrays are reproducible
// across platforms and languages that implement the same two lines.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(seed ^ mix(stream + 1))) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + counter * kGolden); }

  // Uniform on (0, 1]: top 53 bits, shifted up by one ulp of 2^-53.
  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

}  // namespace cot
