#pragma once

#include <cmath>
#include <cstdint>

namespace levylmm {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++, seeded via splitmix64 from a (seed, stream...) tuple so that
/// every (path, purpose) pair owns an independent, reproducible stream.
class Xoshiro256 {
public:
    Xoshiro256(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b = 0) {
        std::uint64_t sm = seed;
        (void)splitmix64(sm);
        sm ^= 0x9e3779b97f4a7c15ULL * stream_a + 0x85ebca6b0f42bd1fULL;
        (void)splitmix64(sm);
        sm ^= 0xc2b2ae3d27d4eb4fULL * stream_b + 0x165667b19e3779f9ULL;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
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

    /// uniform in (0, 1)
    double uniform() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// standard normal (Box-Muller, one value per pair of uniforms; no caching
    /// so the draw count per call is fixed)
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

} // namespace levylmm
