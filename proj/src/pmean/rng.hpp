#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pmean::rng {

// splitmix64, used to derive independent stream seeds from (seed, index) pairs.
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 engine(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(mix(seed * 0x9e3779b97f4a7c15ULL + mix(stream)));
}

// Distributions are hand-rolled; std::*_distribution is not bit-stable across
// library implementations.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double exponential1(std::mt19937_64& g) {
    return -std::log1p(-uniform01(g)); // -log(1-u), u in [0,1)
}

inline std::uint64_t below(std::mt19937_64& g, std::uint64_t bound) {
    // modulo bias is irrelevant at desk scale but cheap to avoid
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
        x = g();
    } while (x >= limit);
    return x % bound;
}

} // namespace pmean::rng
