#pragma once

#include <cstdint>

namespace adamdp {

/// Avalanching 64-bit finalizer (the splitmix64 output function).
inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// splitmix64 step. Output is identical on every platform, which keeps
/// seeded runs byte-reproducible.
inline uint64_t splitmix64(uint64_t& state) {
    return mix64(state += 0x9e3779b97f4a7c15ULL);
}

/// Small counter-based generator: the sequence is a pure function of the
/// seed.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    /// Derive an independent stream, e.g. one per Monte-Carlo trial. The
    /// start state is fully hashed from (seed, counter) so distinct trials
    /// land at unrelated positions of the underlying sequence; seeding
    /// nearby counters by arithmetic offsets alone would make consecutive
    /// trials walk overlapping subsequences.
    static Rng derive(uint64_t seed, uint64_t counter) {
        uint64_t key = mix64(seed + 0x9e3779b97f4a7c15ULL);
        return Rng(mix64(key + 0x9e3779b97f4a7c15ULL * counter));
    }

    uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  private:
    uint64_t state_;
};

} // namespace adamdp
