#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace skewrec {

// All randomized code in the library draws through these helpers so that a
// seed fully determines the output independent of the standard library's
// distribution implementations.
using Rng = std::mt19937_64;

// Uniform double in [0, 1), 53 random bits.
inline double uniform_unit(Rng& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Rng& g, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(g);
}

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_below(Rng& g, std::uint64_t n) {
    const std::uint64_t bucket = UINT64_MAX / n;
    const std::uint64_t limit = bucket * n;
    for (;;) {
        const std::uint64_t r = g();
        if (r < limit) return r / bucket;
    }
}

struct NormalPair {
    double z0;
    double z1;
};

// Box-Muller; two independent standard normals per call.
inline NormalPair normal_pair(Rng& g) {
    const double u1 = 1.0 - uniform_unit(g);  // (0, 1], keeps log finite
    const double u2 = uniform_unit(g);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace skewrec
