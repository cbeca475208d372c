#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dirac_hardy/error.hpp"
#include "dirac_hardy/tridiagonal.hpp"

namespace dirac_hardy {

struct Eigenpair
{
    double value = 0.0;
    std::vector<double> vector;
};

struct EigenOptions
{
    /// Residual bound ||A u - mu M u|| <= residual_tol * ||A||, u M-normalized.
    double residual_tol = 1e-10;
    std::size_t max_inverse_iterations = 40;
};

namespace detail {

inline double m_inner(const SymTridiagonal& m, const std::vector<double>& x, const std::vector<double>& y)
{
    return m.bilinear(x, y);
}

/// Bracket [lo, hi] with count_below(lo) == 0 and count_below(hi) >= k.
inline std::pair<double, double> spectrum_bracket(const SymTridiagonal& a, const SymTridiagonal& m, std::size_t k)
{
    double lo = -1.0;
    for (int it = 0; count_below(a, m, lo) > 0; ++it) {
        if (it > 2000)
            throw Error(Errc::eigensolver_no_convergence, "could not bracket the bottom of the spectrum");
        lo = 2.0 * lo - 1.0;
    }
    double hi = 1.0;
    for (int it = 0; count_below(a, m, hi) < k; ++it) {
        if (it > 2000)
            throw Error(Errc::eigensolver_no_convergence, "could not bracket eigenvalue " + std::to_string(k));
        hi = 2.0 * hi + 1.0;
    }
    return {lo, hi};
}

/// j-th (1-based) eigenvalue of the pencil by Sturm bisection.
inline double bisect_eigenvalue(const SymTridiagonal& a, const SymTridiagonal& m, std::size_t j, double lo, double hi)
{
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (count_below(a, m, mid) >= j)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Lowest k eigenvalues of the symmetric tridiagonal pencil A u = mu M u,
/// M positive definite. Returns M-orthonormal eigenvectors.
inline std::vector<double> lowest_eigenvalues(const SymTridiagonal& a, const SymTridiagonal& m, std::size_t k)
{
    if (k == 0 || k > a.size())
        throw Error(Errc::precondition, "requested " + std::to_string(k) + " eigenvalues of an order-" +
                                            std::to_string(a.size()) + " pencil");
    const auto [lo, hi] = detail::spectrum_bracket(a, m, k);
    std::vector<double> values(k);
    for (std::size_t j = 1; j <= k; ++j)
        values[j - 1] = detail::bisect_eigenvalue(a, m, j, lo, hi);
    return values;
}

inline std::vector<Eigenpair> lowest_eigenpairs(const SymTridiagonal& a, const SymTridiagonal& m, std::size_t k,
                                                const EigenOptions& opts = {})
{
    const std::vector<double> values = lowest_eigenvalues(a, m, k);
    const std::size_t n = a.size();
    const double a_norm = std::max(a.norm_inf(), 1e-300);

    std::vector<Eigenpair> pairs;
    pairs.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double mu = values[j];
        const TridiagonalLU lu(a.axpy(-mu, m));

        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = 1.0 + 0.5 * std::sin(0.37 * static_cast<double>(i) + static_cast<double>(j));

        bool converged = false;
        std::vector<double> residual(n);
        for (std::size_t it = 0; it < opts.max_inverse_iterations; ++it) {
            std::vector<double> rhs = m.apply(x);
            lu.solve_in_place(rhs);
            x = std::move(rhs);
            for (const Eigenpair& prev : pairs) {
                const double overlap = detail::m_inner(m, prev.vector, x);
                for (std::size_t i = 0; i < n; ++i)
                    x[i] -= overlap * prev.vector[i];
            }
            const double norm = std::sqrt(detail::m_inner(m, x, x));
            if (!(norm > 0.0) || !std::isfinite(norm))
                throw Error(Errc::eigensolver_no_convergence, "inverse iteration collapsed");
            for (double& v : x)
                v /= norm;

            const std::vector<double> ax = a.apply(x);
            const std::vector<double> mx = m.apply(x);
            double r2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double r = ax[i] - mu * mx[i];
                r2 += r * r;
            }
            if (it >= 1 && std::sqrt(r2) <= opts.residual_tol * a_norm) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw Error(Errc::eigensolver_no_convergence,
                        "inverse iteration did not reach the residual bound for eigenvalue " + std::to_string(j + 1));

        // Deterministic sign: first significant entry positive.
        double scale = 0.0;
        for (double v : x)
            scale = std::max(scale, std::abs(v));
        for (double v : x) {
            if (std::abs(v) > 1e-8 * scale) {
                if (v < 0.0)
                    for (double& w : x)
                        w = -w;
                break;
            }
        }
        pairs.push_back({mu, std::move(x)});
    }
    return pairs;
}

} // namespace dirac_hardy
