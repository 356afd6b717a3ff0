#include "mvi/rng.hpp"

#include <cmath>
#include <numbers>

namespace mvi {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept
{
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept
{
    return static_cast<double>(counter_hash(seed, stream, counter) >> 11) * 0x1.0p-53;
}

std::pair<double, double> counter_normal_pair(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept
{
    // two uniforms from consecutive sub-counters; u1 kept away from zero
    double u1 = counter_uniform(seed, stream, 2 * counter);
    double u2 = counter_uniform(seed, stream, 2 * counter + 1);
    u1 = 1.0 - u1;  // (0, 1]
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

} // namespace mvi
