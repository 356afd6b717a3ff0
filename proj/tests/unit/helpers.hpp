#pragma once

#include "mvi/grid.hpp"
#include "mvi/rng.hpp"

#include <cmath>
#include <filesystem>
#include <string>

namespace testing {

inline mvi::ComplexGrid random_grid(std::size_t rows, std::size_t cols, double pitch, std::uint64_t seed)
{
    mvi::ComplexGrid g(rows, cols, pitch);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto [a, b] = mvi::counter_normal_pair(seed, mvi::stream::test, i);
        g[i] = {a, b};
    }
    return g;
}

inline double uniform(std::uint64_t seed, std::uint64_t i)
{
    return mvi::counter_uniform(seed, mvi::stream::test, i);
}

inline double wrap(double phase)
{
    return std::remainder(phase, 2.0 * M_PI);
}

// fresh directory under the system temp dir
inline std::filesystem::path scratch(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("mvi_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace testing

namespace testing {

// |Zd u + eta n| - Zd in binary128, u the radar line of sight and n the
// vibration direction, both built from their angles.
inline double brute_range_offset(double zd, double eta, double alpha, double beta, double alpha_q, double beta_q)
{
    using q = __float128;
    const q u[3] = {q(std::cos(beta) * std::cos(alpha)), q(std::cos(beta) * std::sin(alpha)), q(std::sin(beta))};
    const q n[3] = {q(std::cos(beta_q) * std::cos(alpha_q)), q(std::cos(beta_q) * std::sin(alpha_q)),
                    q(std::sin(beta_q))};
    auto norm = [](const q* v) {
        q s = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        q r = q(std::sqrt(double(s)));
        for (int i = 0; i < 3; ++i) r = (r + s / r) / 2;
        return r;
    };
    const q nu = norm(u), nn = norm(n);
    q s = 0;
    for (int i = 0; i < 3; ++i) {
        q c = q(zd) * u[i] / nu + q(eta) * n[i] / nn;
        s += c * c;
    }
    q r = q(std::sqrt(double(s)));
    for (int i = 0; i < 3; ++i) r = (r + s / r) / 2;  // Newton steps to full precision
    return double(r - q(zd));
}

} // namespace testing
