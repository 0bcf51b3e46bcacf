#pragma once

#include <cmath>
#include <cstdint>

namespace dbo {

// All randomness in the library flows through this generator so that runs are
// bitwise reproducible across platforms and standard libraries.  The core is
// xoshiro256** seeded through splitmix64; normal deviates use Box-Muller with
// no state caching, so every draw consumes a fixed number of raw outputs.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from (master, node, iter, purpose, extra).
// Each coordinate is folded in through a full splitmix64 round, so distinct
// tuples give unrelated streams.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t node,
                                 std::uint64_t iter, std::uint64_t purpose,
                                 std::uint64_t extra = 0) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s = h ^ (node * 0x9e3779b97f4a7c15ULL);
    h = splitmix64(s);
    s = h ^ (iter * 0xbf58476d1ce4e5b9ULL);
    h = splitmix64(s);
    s = h ^ (purpose * 0x94d049bb133111ebULL);
    h = splitmix64(s);
    s = h ^ (extra * 0xd6e8feb86659fd93ULL);
    return splitmix64(s);
}

namespace purpose {
// Stream labels used when deriving per-(node, iteration) seeds.
inline constexpr std::uint64_t init = 1;
inline constexpr std::uint64_t upper_batch = 2;
inline constexpr std::uint64_t lower_batch = 3;
inline constexpr std::uint64_t hyper_xi = 4;
inline constexpr std::uint64_t hyper_zeta = 5;
inline constexpr std::uint64_t truncation = 6;
inline constexpr std::uint64_t shard = 7;
inline constexpr std::uint64_t split = 8;
inline constexpr std::uint64_t synth = 9;
}  // namespace purpose

class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& lane : state_) lane = splitmix64(s);
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

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer on the inclusive range [lo, hi] via rejection sampling.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t span = hi - lo + 1;  // hi >= lo; span == 0 means full range
        if (span == 0) return next_u64();
        const std::uint64_t limit = (~std::uint64_t{0} / span) * span;
        std::uint64_t draw;
        do {
            draw = next_u64();
        } while (draw >= limit);
        return lo + draw % span;
    }

    // Standard normal via Box-Muller; always consumes exactly two raw draws and
    // discards the sine partner, so the stream position is draw-count invariant.
    double normal() {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace dbo
