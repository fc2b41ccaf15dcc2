#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace vecseg {

/// Engine-only helpers so results do not depend on the standard library's
/// distribution implementations.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

// Unbiased integer in [0, n).
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do x = rng(); while (x >= limit);
    return x % n;
}

// Integer in [lo, hi].
inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(bounded(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace vecseg
