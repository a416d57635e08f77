#pragma once

#include <cmath>
#include <cstdint>

namespace oqp {

// SplitMix64: the one random generator used by every stochastic component.
// 64-bit state, full-period, and cheap to seed from an arbitrary word, which
// is what makes the seed^replication stream derivation sound. Outputs are
// identical on every platform, so simulation reports are reproducible byte
// for byte given the same seed.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Inverse-CDF exponential draw. log1p keeps the u -> 0 corner exact.
inline double draw_exponential(SplitMix64& rng, double mean) {
    return -mean * std::log1p(-rng.uniform01());
}

// Knuth product-of-uniforms Poisson draw, exact for any mean. Large means are
// split into chunks so exp(-mean) stays representable; Poisson(a+b) equals the
// sum of independent Poisson(a) and Poisson(b) draws.
inline std::int64_t draw_poisson(SplitMix64& rng, double mean) {
    std::int64_t total = 0;
    while (mean > 500.0) {
        double chunk = 500.0;
        double limit = std::exp(-chunk);
        double prod = 1.0;
        std::int64_t k = -1;
        do {
            ++k;
            prod *= rng.uniform01();
        } while (prod > limit);
        total += k;
        mean -= chunk;
    }
    double limit = std::exp(-mean);
    double prod = 1.0;
    std::int64_t k = -1;
    do {
        ++k;
        prod *= rng.uniform01();
    } while (prod > limit);
    return total + k;
}

}  // namespace oqp
