#pragma once

#include <cstdint>

// Platform-independent seeded generator (splitmix64). Used wherever outputs
// must be bit-identical across runs and toolchains.

namespace svipipe::rng {

class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double range(double lo, double hi) { return lo + uniform() * (hi - lo); }

    size_t below(size_t n) { return static_cast<size_t>(uniform() * static_cast<double>(n)); }

  private:
    uint64_t state_;
};

}  // namespace svipipe::rng
