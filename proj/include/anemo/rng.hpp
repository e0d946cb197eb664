#pragma once

#include <cstdint>
#include <cmath>

namespace anemo {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/**
 * Deterministic xoshiro256** generator, seeded through splitmix64.
 *
 * The algorithm is fixed by this header, not by the standard library, so
 * streams are bit-identical across platforms and compiler versions. Every
 * stochastic operation in the library threads an Rng explicitly; there is
 * no hidden global state.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform draw in the open interval (0,1); 0 is rejected so the
    /// result is always usable as a probability for quantile transforms.
    double uniform() {
        for (;;) {
            const double x = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
            if (x > 0.0) return x;
        }
    }

    /// Uniform integer in [0, bound), unbiased (rejection sampling).
    std::uint64_t integer(std::uint64_t bound) {
        const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x < limit) return x % bound;
        }
    }

    /**
     * Child generator for stream @p index, derived only from the original
     * seed, so members of a seeded ensemble can be generated independently
     * (and concurrently) with reproducible results.
     */
    [[nodiscard]] Rng split(std::uint64_t index) const {
        std::uint64_t sm = seed_ ^ (0xA02466F5E1C4C5A1ULL + index);
        detail::splitmix64(sm);
        return Rng(detail::splitmix64(sm));
    }

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::uint64_t state_[4];
};

}  // namespace anemo
