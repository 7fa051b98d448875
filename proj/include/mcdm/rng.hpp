// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mcdm/types.hpp"

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace mcdm {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seeded random stream: a 64-bit Mersenne Twister whose seed is a SplitMix64
/// hash of a master seed and a list of keys. Streams derived from distinct
/// key lists are independent for simulation purposes; the same keys always
/// reproduce the same draws.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    static RngStream derive(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
        std::uint64_t h = splitmix64(master);
        for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632BE59BD9B4E019ull));
        return RngStream(h);
    }

    std::uint64_t seed() const { return seed_; }

    double normal() { return normal_(engine_); }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cf64 complex_normal(double variance) {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace mcdm
