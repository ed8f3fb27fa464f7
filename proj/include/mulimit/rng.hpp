#pragma once

// Seeded, splittable random streams. std::mt19937_64's output sequence is fixed
// by the standard, and the helpers below avoid the library-specific
// <random> distributions, so samples are identical on every platform.

#include <cstdint>
#include <random>

namespace mulimit {

inline constexpr const char* kRngAlgorithm = "mt19937_64/splitmix64";

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream `stream` of the generator family keyed by `seed`.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x51ed270b27b7e5c3ULL)));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double unit_double(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by rejection (n > 0).
inline std::uint64_t uniform_below(std::mt19937_64& g, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = g();
    while (x >= limit) {
        x = g();
    }
    return x % n;
}

} // namespace mulimit
