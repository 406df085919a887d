#pragma once

#include <cmath>
#include <cstdint>

namespace msm {

// 64-bit finalizer (splitmix64 step). Used for seeding and stream derivation.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for one replication of one ensemble, decorrelated across (k, rep).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k, std::uint64_t rep) {
    std::uint64_t h = mix64(master ^ 0x8f1bbcdcbfa53e0bULL);
    h = mix64(h ^ k);
    return mix64(h ^ rep);
}

// xoshiro256** with a splitmix64-seeded state. Self-contained so identical
// seeds give bit-identical streams on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) {
        for (auto& w : s_) {
            seed = mix64(seed);
            w = seed;
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via the polar method; pairs are cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4] = {};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace msm
