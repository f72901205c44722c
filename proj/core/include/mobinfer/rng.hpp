#pragma once

#include <cstdint>

namespace mobinfer {

// SplitMix64 (Steele, Lea & Flood 2014; public domain reference constants).
// Used instead of a <random> engine because every output is a fixed function
// of the 64-bit state: traces generated from a seed are bit-identical on any
// platform, whereas <random> distributions are implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1): top 53 bits scaled by 2^-53.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * next_double();
  }

 private:
  std::uint64_t state_;
};

// Stateless mix of three words, SplitMix64-style. Deterministic tie-breakers
// (e.g. the direction between coincident nodes) are derived from this.
inline std::uint64_t mix_hash(std::uint64_t a, std::uint64_t b,
                              std::uint64_t c) noexcept {
  SplitMix64 g(a ^ (b * 0x9e3779b97f4a7c15ULL) ^ (c * 0xff51afd7ed558ccdULL));
  g.next_u64();
  return g.next_u64();
}

}  // namespace mobinfer
