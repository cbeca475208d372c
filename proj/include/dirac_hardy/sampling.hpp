#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "dirac_hardy/grid.hpp"

namespace dirac_hardy {

/// Sum of three Gaussian bumps in log r with random centers in
/// [1e-3, 20], widths in [0.3, 1.5] (in log r) and standard normal amplitudes.
inline double gaussian_profile_value(std::span<const double, 9> p, double r)
{
    const double x = std::log(r);
    double acc = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        const double z = (x - p[3 * j]) / p[3 * j + 1];
        acc += p[3 * j + 2] * std::exp(-0.5 * z * z);
    }
    return acc;
}

template <class Rng>
std::array<double, 9> draw_gaussian_profile(Rng& rng)
{
    std::uniform_real_distribution<double> center(std::log(1e-3), std::log(20.0));
    std::uniform_real_distribution<double> width(0.3, 1.5);
    std::normal_distribution<double> amp(0.0, 1.0);
    std::array<double, 9> p{};
    for (std::size_t j = 0; j < 3; ++j) {
        p[3 * j] = center(rng);
        p[3 * j + 1] = width(rng);
        p[3 * j + 2] = amp(rng);
    }
    return p;
}

/// Random nodal vector (length N, zero at r_max).
template <class Rng>
std::vector<double> random_nodal(Rng& rng, const RadialGrid& grid)
{
    const auto p = draw_gaussian_profile(rng);
    std::vector<double> out(grid.size());
    const auto r = grid.nodes();
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
        out[i] = gaussian_profile_value(p, r[i]);
    out.back() = 0.0;
    return out;
}

/// Random vector on the Gauss samples.
template <class Rng>
std::vector<double> random_samples(Rng& rng, const RadialGrid& grid)
{
    const auto p = draw_gaussian_profile(rng);
    std::vector<double> out(grid.num_samples());
    const auto r = grid.sample_r();
    for (std::size_t s = 0; s < out.size(); ++s)
        out[s] = gaussian_profile_value(p, r[s]);
    return out;
}

} // namespace dirac_hardy
