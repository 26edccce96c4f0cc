#pragma once

#include <cstdint>

namespace rispls {

/// xoshiro256++ with splitmix64 seeding. Satisfies UniformRandomBitGenerator
/// so std::gamma_distribution and friends work on top of it.
///
/// Per-trial substreams come from stream(master_seed, index): the state is a
/// pure function of (seed, index), so any partitioning of trials across
/// workers reproduces identical draws.
class Rng {
  public:
    using result_type = std::uint64_t;

    Rng() : Rng(0x9e3779b97f4a7c15ull) {}
    explicit Rng(std::uint64_t seed) { seed_from(seed); }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }

    static Rng stream(std::uint64_t master_seed, std::uint64_t index) {
        Rng r;
        r.seed_from(master_seed + 0x9e3779b97f4a7c15ull * (index + 1));
        return r;
    }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in (0,1).
    double uniform() {
        return ((*this)() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    void seed_from(std::uint64_t seed) {
        auto next = [&seed]() {
            seed += 0x9e3779b97f4a7c15ull;
            std::uint64_t z = seed;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            return z ^ (z >> 31);
        };
        for (auto& s : s_) s = next();
    }

    std::uint64_t s_[4];
};

}  // namespace rispls
