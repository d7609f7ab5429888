#pragma once

#include <cstdint>

namespace ggk {

// Output finalizer of splitmix64.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // 53 random bits as an integer, for exact rational sampling.
  std::uint64_t next_u53() { return next() >> 11; }

private:
  std::uint64_t state_;
};

// Stream for one sample index. Every sample draws from its own stream, so
// results do not depend on how samples are split across threads
// ("splitmix64-counter-v1").
inline SplitMix64 counter_stream(std::uint64_t seed, std::uint64_t counter) {
  return SplitMix64(mix64(seed + 0x9e3779b97f4a7c15ULL * (counter + 1)));
}

} // namespace ggk
