#pragma once

#include <cstdint>
#include <utility>

namespace mvi {

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, counter), so results do not depend on evaluation order
// or thread count.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept;

// Uniform in [0, 1).
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept;

// Two independent standard normals (Box-Muller).
std::pair<double, double> counter_normal_pair(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept;

// Named streams so unrelated consumers of one seed never collide.
namespace stream {
inline constexpr std::uint64_t noise = 1;
inline constexpr std::uint64_t speckle = 2;
inline constexpr std::uint64_t pattern_order = 3;
inline constexpr std::uint64_t scene = 4;
inline constexpr std::uint64_t test = 5;
} // namespace stream

} // namespace mvi
