#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sleepscore::rng {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent stream seed for worker `index` (per series, per tree, ...), so
// parallel and serial execution draw identical numbers.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(seed ^ splitmix64(index + 0x9E3779B97F4A7C15ULL));
}

// Uniform in [0, 1) with 53 random bits. Hand-rolled instead of
// std::uniform_real_distribution so the stream is identical across standard
// libraries.
inline double uniform01(std::mt19937_64& g) noexcept {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform01(g);
}

// Box-Muller without caching the second value, for a fixed two-draws-per-call
// consumption pattern.
inline double normal(std::mt19937_64& g) noexcept {
    double u1 = 1.0 - uniform01(g);  // (0, 1]
    double u2 = uniform01(g);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline std::size_t uniform_index(std::mt19937_64& g, std::size_t n) noexcept {
    return static_cast<std::size_t>(g() % n);
}

}  // namespace sleepscore::rng
