#ifndef PRICEBAND_RNG_HPP
#define PRICEBAND_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace priceband {

/// SplitMix64 (Steele, Lea, Flood). State advances by the 64-bit golden ratio;
/// used for seeding and for deriving per-path stream keys.
struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// xoshiro256++ (Blackman & Vigna, public-domain reference implementation).
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& word : state_) word = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_;
};

/// Stream for path `path_index` of a run seeded `seed`: the xoshiro state is
/// seeded from the SplitMix64 sequence segment starting at
/// seed + path_index * 4 * golden_gamma, i.e. disjoint 4-word windows of one
/// SplitMix64 stream per path. Scheduling-independent: a path's draws depend
/// only on (seed, path_index).
inline Xoshiro256pp path_stream(std::uint64_t seed, std::uint64_t path_index) {
    return Xoshiro256pp(seed + path_index * (4ULL * 0x9e3779b97f4a7c15ULL));
}

/// Standard normal sampler: Marsaglia polar transform with one cached spare.
class NormalSampler {
public:
    explicit NormalSampler(Xoshiro256pp rng) : rng_(rng) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * rng_.uniform01() - 1.0;
            v = 2.0 * rng_.uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        has_spare_ = true;
        return u * scale;
    }

private:
    Xoshiro256pp rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace priceband

#endif
