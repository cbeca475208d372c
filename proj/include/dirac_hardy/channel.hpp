#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dirac_hardy/error.hpp"
#include "dirac_hardy/grid.hpp"
#include "dirac_hardy/tridiagonal.hpp"

namespace dirac_hardy {

/// Radial realization of -i sigma.grad in spin-orbit channel kappa:
/// D_kappa f = f' + (kappa / r) f.
///
/// Upper components are nodal vectors of length N (continuous piecewise
/// linear, last entry pinned to 0 at r_max); lower components are sampled
/// at the Gauss points of the grid. The two spaces carry the inner products
///   <f, g>_M = sum_s w_s f_h(x_s) g_h(x_s)     (consistent P1 mass M)
///   <u, v>_q = sum_s w_s u_s v_s.
/// The weighted adjoint is D^dagger = M^{-1} D^T W_q on the free nodes.
class ChannelOperator
{
  public:
    ChannelOperator(int kappa, RadialGrid grid) : kappa_(kappa), grid_(std::move(grid))
    {
        if (kappa_ == 0)
            throw Error(Errc::zero_kappa, "spin-orbit number must be nonzero");
        const std::size_t ns = grid_.num_samples();
        left_.resize(ns);
        right_.resize(ns);
        const auto r = grid_.sample_r();
        const auto t = grid_.sample_t();
        for (std::size_t s = 0; s < ns; ++s) {
            const double h = grid_.element_length(RadialGrid::element_of(s));
            const double k_over_r = static_cast<double>(kappa_) / r[s];
            left_[s] = -1.0 / h + k_over_r * (1.0 - t[s]);
            right_[s] = 1.0 / h + k_over_r * t[s];
        }

        const std::size_t n = free_size();
        mass_ = SymTridiagonal(n);
        const auto w = grid_.sample_weights();
        for (std::size_t s = 0; s < ns; ++s) {
            const std::size_t e = RadialGrid::element_of(s);
            const double a = 1.0 - t[s];
            const double b = t[s];
            mass_.diag[e] += w[s] * a * a;
            if (e + 1 < n) {
                mass_.diag[e + 1] += w[s] * b * b;
                mass_.off[e] += w[s] * a * b;
            }
        }
        mass_factor_ = std::make_shared<TridiagonalCholesky>(mass_);
    }

    int kappa() const noexcept { return kappa_; }
    const RadialGrid& grid() const noexcept { return grid_; }

    /// Number of free nodal unknowns (all nodes but r_max).
    std::size_t free_size() const noexcept { return grid_.size() - 1; }

    /// Consistent mass matrix on the free nodes.
    const SymTridiagonal& mass() const noexcept { return mass_; }

    /// Coefficients of (D f)(x_s) = left(s) f_e + right(s) f_{e+1}.
    double left(std::size_t s) const noexcept { return left_[s]; }
    double right(std::size_t s) const noexcept { return right_[s]; }

    /// D_kappa f sampled at the Gauss points.
    std::vector<double> apply(std::span<const double> f) const
    {
        check_nodal(f);
        const std::size_t ns = grid_.num_samples();
        std::vector<double> out(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            const std::size_t e = RadialGrid::element_of(s);
            out[s] = left_[s] * f[e] + right_[s] * f[e + 1];
        }
        return out;
    }

    /// Values of the piecewise linear interpolant at the Gauss points.
    std::vector<double> interpolate(std::span<const double> f) const
    {
        check_nodal(f);
        const auto t = grid_.sample_t();
        std::vector<double> out(grid_.num_samples());
        for (std::size_t s = 0; s < out.size(); ++s) {
            const std::size_t e = RadialGrid::element_of(s);
            out[s] = (1.0 - t[s]) * f[e] + t[s] * f[e + 1];
        }
        return out;
    }

    /// D^T W_q g restricted to the free nodes (length N, last entry 0).
    std::vector<double> weak_adjoint(std::span<const double> g) const
    {
        check_samples(g);
        const auto w = grid_.sample_weights();
        std::vector<double> out(grid_.size(), 0.0);
        for (std::size_t s = 0; s < g.size(); ++s) {
            const std::size_t e = RadialGrid::element_of(s);
            out[e] += left_[s] * w[s] * g[s];
            out[e + 1] += right_[s] * w[s] * g[s];
        }
        out.back() = 0.0;
        return out;
    }

    /// E^T W_q g: load vector of sampled data against the hat functions.
    std::vector<double> weak_load(std::span<const double> g) const
    {
        check_samples(g);
        const auto w = grid_.sample_weights();
        const auto t = grid_.sample_t();
        std::vector<double> out(grid_.size(), 0.0);
        for (std::size_t s = 0; s < g.size(); ++s) {
            const std::size_t e = RadialGrid::element_of(s);
            out[e] += (1.0 - t[s]) * w[s] * g[s];
            out[e + 1] += t[s] * w[s] * g[s];
        }
        out.back() = 0.0;
        return out;
    }

    /// Solves M x = b on the free nodes; b has length N, result has last entry 0.
    std::vector<double> solve_mass(std::vector<double> b) const
    {
        check_nodal(b);
        mass_factor_->solve_in_place(std::span<double>(b.data(), free_size()));
        b.back() = 0.0;
        return b;
    }

    /// D^dagger g = M^{-1} D^T W_q g.
    std::vector<double> adjoint(std::span<const double> g) const { return solve_mass(weak_adjoint(g)); }

    /// <f, g>_M over the free nodes.
    double inner_upper(std::span<const double> f, std::span<const double> g) const
    {
        check_nodal(f);
        check_nodal(g);
        return mass_.bilinear(f.first(free_size()), g.first(free_size()));
    }

    double inner_lower(std::span<const double> u, std::span<const double> v) const
    {
        check_samples(u);
        check_samples(v);
        const auto w = grid_.sample_weights();
        double acc = 0.0;
        for (std::size_t s = 0; s < u.size(); ++s)
            acc += w[s] * u[s] * v[s];
        return acc;
    }

    /// D_kappa f at element midpoints by central differencing of the nodal
    /// values; second-order accurate for smooth f.
    std::vector<double> apply_midpoint(std::span<const double> f) const
    {
        check_nodal(f);
        const auto r = grid_.nodes();
        std::vector<double> out(grid_.num_elements());
        for (std::size_t e = 0; e < out.size(); ++e) {
            const double h = r[e + 1] - r[e];
            const double mid = 0.5 * (r[e] + r[e + 1]);
            out[e] = (f[e + 1] - f[e]) / h + static_cast<double>(kappa_) / mid * 0.5 * (f[e] + f[e + 1]);
        }
        return out;
    }

  private:
    void check_nodal(std::span<const double> f) const
    {
        if (f.size() != grid_.size())
            throw Error(Errc::precondition, "nodal vector has length " + std::to_string(f.size()) + ", grid has " +
                                                std::to_string(grid_.size()) + " nodes");
    }
    void check_samples(std::span<const double> g) const
    {
        if (g.size() != grid_.num_samples())
            throw Error(Errc::precondition, "sample vector has length " + std::to_string(g.size()) + ", grid has " +
                                                std::to_string(grid_.num_samples()) + " samples");
    }

    int kappa_;
    RadialGrid grid_;
    std::vector<double> left_;
    std::vector<double> right_;
    SymTridiagonal mass_;
    std::shared_ptr<const TridiagonalCholesky> mass_factor_;
};

inline ChannelOperator build_channel_operator(int kappa, const RadialGrid& grid)
{
    return ChannelOperator(kappa, grid);
}

} // namespace dirac_hardy
