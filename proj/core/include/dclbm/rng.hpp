#pragma once

#include <cstdint>

namespace dclbm {

// splitmix64. Small, seedable, and platform-independent, which keeps every
// sampled artifact bitwise reproducible. Per-entry streams are derived by
// hashing (seed, i, j) so parallel generation is order-independent.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
  SplitMix64 g(a);
  SplitMix64 h(g.next() ^ b);
  return h.next();
}

inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return hash_mix(hash_mix(a, b), c);
}

}  // namespace dclbm
