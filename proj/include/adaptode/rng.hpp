#pragma once

#include <cstdint>

namespace adaptode::rng {

// Counter-based SplitMix64: the value at (key, counter) is the counter-th
// output of a SplitMix64 generator whose state starts at `key`. Streams are
// split by deriving a fresh key per stream index, so any draw can be
// reproduced without replaying the draws before it.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t at(std::uint64_t key, std::uint64_t counter) noexcept
{
    return mix64(key + (counter + 1) * kGolden);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) noexcept
{
    return at(seed, stream);
}

/// Uniform on the open interval (0, 1) with 53 random bits.
constexpr double unit_open(std::uint64_t bits) noexcept
{
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform on the open interval (-a, a).
constexpr double symmetric(std::uint64_t bits, double a) noexcept { return a * (2.0 * unit_open(bits) - 1.0); }

} // namespace adaptode::rng
