#pragma once

#include <cstdint>

namespace gmmkit {

// SplitMix64 finalizer (Vigna). Doubles as the mixing step of the keyed
// counter stream in gcws.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Maps a 64-bit word onto (0,1). Never returns 0 or 1, so log() of the
// result (or of one minus it) stays finite.
inline double unit_open(std::uint64_t w) {
  return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

// Plain sequential splitmix64 stream for places where an ordinary seeded
// generator is enough (permutations, synthetic data in tests).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  double uniform() { return unit_open(next()); }

  // Uniform in [0, n). Modulo bias is irrelevant at the range sizes used here.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace gmmkit
