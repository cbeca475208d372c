#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dirac_hardy/error.hpp"

namespace dirac_hardy {

enum class Scheme { uniform, log_uniform };

inline const char* to_string(Scheme s) noexcept
{
    return s == Scheme::uniform ? "uniform" : "log-uniform";
}

/// Four-point Gauss-Legendre rule on [0, 1].
struct GaussRule
{
    static constexpr std::size_t points = 4;
    static constexpr std::array<double, points> abscissae{
        0.5 - 0.5 * 0.8611363115940526, 0.5 - 0.5 * 0.3399810435848563,
        0.5 + 0.5 * 0.3399810435848563, 0.5 + 0.5 * 0.8611363115940526};
    static constexpr std::array<double, points> weights{
        0.5 * 0.3478548451374538, 0.5 * 0.6521451548625461,
        0.5 * 0.6521451548625461, 0.5 * 0.3478548451374538};
};

/// Nodes r_0 < ... < r_{N-1} on [r_min, r_max] with trapezoidal weights.
///
/// Every element [r_e, r_{e+1}] also carries GaussRule::points samples; the
/// sample arrays are laid out element-major (sample s lives in element
/// s / GaussRule::points). Functions on the grid are continuous piecewise
/// linear in their nodal values.
class RadialGrid
{
  public:
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t num_elements() const noexcept { return nodes_.size() - 1; }
    std::size_t num_samples() const noexcept { return sample_r_.size(); }

    double r_min() const noexcept { return nodes_.front(); }
    double r_max() const noexcept { return nodes_.back(); }
    Scheme scheme() const noexcept { return scheme_; }

    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }

    std::span<const double> sample_r() const noexcept { return sample_r_; }
    std::span<const double> sample_weights() const noexcept { return sample_w_; }
    /// Local coordinate t in [0, 1] of each sample inside its element.
    std::span<const double> sample_t() const noexcept { return sample_t_; }

    double element_length(std::size_t e) const noexcept { return nodes_[e + 1] - nodes_[e]; }
    static constexpr std::size_t element_of(std::size_t sample) noexcept
    {
        return sample / GaussRule::points;
    }

    friend RadialGrid build_grid(double r_min, double r_max, std::size_t n, Scheme scheme);

  private:
    RadialGrid() = default;

    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> sample_r_;
    std::vector<double> sample_w_;
    std::vector<double> sample_t_;
    Scheme scheme_ = Scheme::log_uniform;
};

inline RadialGrid build_grid(double r_min, double r_max, std::size_t n, Scheme scheme)
{
    if (!(r_min > 0.0) || !(r_min < r_max) || !std::isfinite(r_max))
        throw Error(Errc::invalid_range, "need 0 < r_min < r_max, got r_min=" + std::to_string(r_min) +
                                             ", r_max=" + std::to_string(r_max));
    if (n < 16)
        throw Error(Errc::too_few_nodes, "need N >= 16, got " + std::to_string(n));

    RadialGrid g;
    g.scheme_ = scheme;
    g.nodes_.resize(n);
    const double last = static_cast<double>(n - 1);
    if (scheme == Scheme::uniform) {
        const double h = (r_max - r_min) / last;
        for (std::size_t i = 0; i < n; ++i)
            g.nodes_[i] = r_min + h * static_cast<double>(i);
    } else {
        const double lo = std::log(r_min);
        const double step = (std::log(r_max) - lo) / last;
        for (std::size_t i = 0; i < n; ++i)
            g.nodes_[i] = std::exp(lo + step * static_cast<double>(i));
    }
    g.nodes_.front() = r_min;
    g.nodes_.back() = r_max;

    g.weights_.assign(n, 0.0);
    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double h = g.nodes_[e + 1] - g.nodes_[e];
        g.weights_[e] += 0.5 * h;
        g.weights_[e + 1] += 0.5 * h;
    }

    const std::size_t q = GaussRule::points;
    g.sample_r_.resize((n - 1) * q);
    g.sample_w_.resize((n - 1) * q);
    g.sample_t_.resize((n - 1) * q);
    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double a = g.nodes_[e];
        const double h = g.nodes_[e + 1] - a;
        for (std::size_t j = 0; j < q; ++j) {
            const std::size_t s = e * q + j;
            g.sample_t_[s] = GaussRule::abscissae[j];
            g.sample_r_[s] = a + h * GaussRule::abscissae[j];
            g.sample_w_[s] = h * GaussRule::weights[j];
        }
    }
    return g;
}

/// log-uniform, r_min = 1e-6, r_max = 60, N = 4000.
inline RadialGrid default_grid()
{
    return build_grid(1e-6, 60.0, 4000, Scheme::log_uniform);
}

} // namespace dirac_hardy
