#pragma once

// Counter-based generator: value(seed, stream, i) = splitmix64 finalizer of
// seed + golden * (stream * 2^32 + i + 1). Any implementation that repeats
// these few lines reproduces the same random ensembles.

#include "ewlab/averages.hpp"

#include <cstdint>

namespace ewlab::rng {

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t counter_value(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
{
    return mix64(seed + golden_gamma * ((stream << 32) + index + 1));
}

// Uniform in [0, 1) with 53 random bits.
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
{
    return static_cast<double>(counter_value(seed, stream, index) >> 11) * 0x1.0p-53;
}

// +-1 field on Z_J; the sign is the top bit of the counter value.
inline averages::FinitaryField random_sign_field(std::size_t modulus, std::uint64_t seed,
                                                 std::uint64_t stream)
{
    std::vector<averages::Complex> values(modulus);
    for (std::size_t j = 0; j < modulus; ++j)
        values[j] = (counter_value(seed, stream, j) >> 63) ? -1.0 : 1.0;
    return averages::FinitaryField(std::move(values));
}

} // namespace ewlab::rng
