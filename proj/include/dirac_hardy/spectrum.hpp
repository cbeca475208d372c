#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dirac_hardy/error.hpp"
#include "dirac_hardy/forms.hpp"
#include "dirac_hardy/grid.hpp"
#include "dirac_hardy/oracle.hpp"
#include "dirac_hardy/potential.hpp"
#include "dirac_hardy/tridiagonal.hpp"

namespace dirac_hardy {

struct SpectralOptions
{
    double tol_gamma = 1e-8;
    double tol_mu = 1e-7;
    /// Search window in gamma; lower end defaults to sup V + 1e-6.
    std::optional<double> gamma_lo;
    double gamma_hi = 2.0;
    /// Distance to 1 + cV_hint below which the root is flagged as sitting on
    /// the Hardy frontier.
    double endpoint_tol = 1e-3;
};

struct SpectralResult
{
    double E = 0.0;
    double gamma_star = 0.0;
    int kappa = 0;
    int k = 0;
    double mu_at_root = 0.0;
    /// Nodal, M-normalized, last entry 0.
    std::vector<double> phi;
    /// D phi / (gamma* - V) at the Gauss samples.
    std::vector<double> chi;
    double gamma_lo = 0.0;
    double gamma_hi = 0.0;
    std::size_t grid_size = 0;
    double r_min = 0.0;
    double r_max = 0.0;
    Scheme scheme = Scheme::log_uniform;
    bool endpoint = false;
};

/// E is the k-th eigenvalue of H in channel kappa iff mu_k(A_{1+E}) = 0.
/// mu_k is strictly decreasing in gamma, so the number of negative form
/// eigenvalues is a monotone step function of gamma and its k-th jump is
/// located by bisection on inertia counts.
inline SpectralResult find_eigenvalue(const RadialPotential& v, int kappa, int k, const RadialGrid& grid,
                                      const SpectralOptions& opts = {})
{
    if (k < 1 || static_cast<std::size_t>(k) > grid.size() / 4)
        throw Error(Errc::precondition, "level index out of range: " + std::to_string(k));
    const double lo0 = opts.gamma_lo.value_or(v.Gamma + 1e-6);
    const double hi0 = opts.gamma_hi;
    if (!(lo0 > v.Gamma) || !(lo0 < hi0))
        throw Error(Errc::window_invalid, "search window must satisfy sup V < lo < hi");

    const auto kk = static_cast<std::size_t>(k);
    auto negatives = [&](double gamma) {
        const FormMatrix f = assemble_form(v, gamma, kappa, grid);
        return count_below(f.matrix, f.gram(), 0.0);
    };
    if (negatives(hi0) < kk)
        throw Error(Errc::no_eigenvalue, "fewer than " + std::to_string(k) + " levels below gamma = " +
                                             std::to_string(hi0) + " in channel " + std::to_string(kappa));
    if (negatives(lo0) >= kk)
        throw Error(Errc::window_invalid, "level " + std::to_string(k) + " lies below the search window");

    double lo = lo0;
    double hi = hi0;
    auto converged = [&](double gamma) {
        const FormMatrix f = assemble_form(v, gamma, kappa, grid);
        return std::abs(lowest_eigenvalues(f.matrix, f.gram(), kk).back()) <= opts.tol_mu;
    };
    for (int it = 0; it < 200; ++it) {
        if (hi - lo <= opts.tol_gamma && converged(0.5 * (lo + hi)))
            break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (negatives(mid) >= kk)
            hi = mid;
        else
            lo = mid;
    }

    SpectralResult out;
    out.gamma_star = 0.5 * (lo + hi);
    out.E = out.gamma_star - 1.0;
    out.kappa = kappa;
    out.k = k;
    out.gamma_lo = lo;
    out.gamma_hi = hi;
    out.grid_size = grid.size();
    out.r_min = grid.r_min();
    out.r_max = grid.r_max();
    out.scheme = grid.scheme();

    const FormMatrix f = assemble_form(v, out.gamma_star, kappa, grid);
    const std::vector<Eigenpair> pairs = lowest_eigenpairs(f, kk);
    out.mu_at_root = pairs.back().value;
    out.phi = pairs.back().vector;
    out.chi = f.channel.apply(out.phi);
    for (std::size_t s = 0; s < out.chi.size(); ++s)
        out.chi[s] /= out.gamma_star - f.v_samples[s];
    out.endpoint = v.cV_hint && std::abs(out.gamma_star - (1.0 + *v.cV_hint)) <= opts.endpoint_tol;
    return out;
}

/// Least-squares power s in |phi| ~ r^s over the nodes of the first decade
/// [r_min, 10 r_min]. Zero entries are skipped.
inline double eigenfunction_exponent(std::span<const double> phi, const RadialGrid& grid)
{
    if (phi.size() != grid.size())
        throw Error(Errc::precondition, "phi does not match the grid");
    const auto r = grid.nodes();
    const double edge = 10.0 * grid.r_min() * (1.0 + 1e-12);
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < r.size() && r[i] <= edge; ++i) {
        if (phi[i] == 0.0)
            continue;
        const double x = std::log(r[i]);
        const double y = std::log(std::abs(phi[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 3)
        throw Error(Errc::insufficient_nodes, "need at least 3 nonzero nodes in the first decade, found " +
                                                  std::to_string(m));
    const double dm = static_cast<double>(m);
    const double den = dm * sxx - sx * sx;
    if (!(den > 0.0))
        throw Error(Errc::insufficient_nodes, "first-decade nodes are degenerate");
    return (dm * sxy - sx * sy) / den;
}

} // namespace dirac_hardy
