#pragma once

#include <cstdint>
#include <random>

namespace warpbo {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
// Avoids std::uniform_real_distribution so that streams are identical across
// standard-library implementations.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double a, double b) {
    return a + uniform01(rng) * (b - a);
}

} // namespace warpbo
