#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "dirac_hardy/error.hpp"

namespace dirac_hardy {

/// Symmetric tridiagonal matrix; off[i] couples rows i and i + 1.
struct SymTridiagonal
{
    std::vector<double> diag;
    std::vector<double> off;

    SymTridiagonal() = default;
    explicit SymTridiagonal(std::size_t n) : diag(n, 0.0), off(n > 0 ? n - 1 : 0, 0.0) {}

    std::size_t size() const noexcept { return diag.size(); }

    /// y = A x over the leading size() entries of x.
    void apply(std::span<const double> x, std::span<double> y) const
    {
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            double acc = diag[i] * x[i];
            if (i > 0)
                acc += off[i - 1] * x[i - 1];
            if (i + 1 < n)
                acc += off[i] * x[i + 1];
            y[i] = acc;
        }
    }

    std::vector<double> apply(std::span<const double> x) const
    {
        std::vector<double> y(size());
        apply(x, y);
        return y;
    }

    /// x^T A y.
    double bilinear(std::span<const double> x, std::span<const double> y) const
    {
        const std::size_t n = size();
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = diag[i] * y[i];
            if (i > 0)
                row += off[i - 1] * y[i - 1];
            if (i + 1 < n)
                row += off[i] * y[i + 1];
            acc += x[i] * row;
        }
        return acc;
    }

    /// Infinity norm (max absolute row sum).
    double norm_inf() const noexcept
    {
        const std::size_t n = size();
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = std::abs(diag[i]);
            if (i > 0)
                row += std::abs(off[i - 1]);
            if (i + 1 < n)
                row += std::abs(off[i]);
            best = std::max(best, row);
        }
        return best;
    }

    /// this + alpha * other.
    SymTridiagonal axpy(double alpha, const SymTridiagonal& other) const
    {
        SymTridiagonal out = *this;
        for (std::size_t i = 0; i < out.diag.size(); ++i)
            out.diag[i] += alpha * other.diag[i];
        for (std::size_t i = 0; i < out.off.size(); ++i)
            out.off[i] += alpha * other.off[i];
        return out;
    }
};

/// Number of eigenvalues of the pencil (A, M) strictly below sigma, M
/// positive definite. Sylvester inertia of A - sigma M via the LDL^T pivots.
inline std::size_t count_below(const SymTridiagonal& a, const SymTridiagonal& m, double sigma)
{
    const std::size_t n = a.size();
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    std::size_t negatives = 0;
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pivot = a.diag[i] - sigma * m.diag[i];
        if (i > 0) {
            const double b = a.off[i - 1] - sigma * m.off[i - 1];
            pivot -= b * (b / d);
        }
        if (std::abs(pivot) < tiny)
            pivot = -tiny;
        if (pivot < 0.0)
            ++negatives;
        d = pivot;
    }
    return negatives;
}

/// LDL^T factorization of a symmetric positive definite tridiagonal matrix.
class TridiagonalCholesky
{
  public:
    explicit TridiagonalCholesky(const SymTridiagonal& a) : d_(a.size()), l_(a.off.size())
    {
        const std::size_t n = a.size();
        for (std::size_t i = 0; i < n; ++i) {
            double pivot = a.diag[i];
            if (i > 0) {
                l_[i - 1] = a.off[i - 1] / d_[i - 1];
                pivot -= l_[i - 1] * a.off[i - 1];
            }
            if (!(pivot > 0.0)) {
                positive_ = false;
                return;
            }
            d_[i] = pivot;
        }
    }

    bool positive_definite() const noexcept { return positive_; }

    void solve_in_place(std::span<double> b) const
    {
        if (!positive_)
            throw Error(Errc::solver_singular, "matrix is not positive definite");
        const std::size_t n = d_.size();
        for (std::size_t i = 1; i < n; ++i)
            b[i] -= l_[i - 1] * b[i - 1];
        for (std::size_t i = 0; i < n; ++i)
            b[i] /= d_[i];
        for (std::size_t i = n; i-- > 1;)
            b[i - 1] -= l_[i - 1] * b[i];
    }

  private:
    std::vector<double> d_;
    std::vector<double> l_;
    bool positive_ = true;
};

/// LU with partial pivoting of a (possibly indefinite) symmetric tridiagonal
/// matrix, following the LAPACK gttrf/gtts2 layout. Zero pivots are replaced
/// by a tiny multiple of the matrix norm so inverse iteration can proceed.
class TridiagonalLU
{
  public:
    explicit TridiagonalLU(const SymTridiagonal& a)
        : dl_(a.off), d_(a.diag), du_(a.off), du2_(a.size() > 2 ? a.size() - 2 : 0, 0.0),
          swap_(a.off.size(), false)
    {
        const std::size_t n = d_.size();
        const double floor = std::max(a.norm_inf(), 1.0) * std::numeric_limits<double>::epsilon() * 1e-3;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(d_[i]) >= std::abs(dl_[i])) {
                if (d_[i] == 0.0)
                    d_[i] = floor;
                const double fact = dl_[i] / d_[i];
                dl_[i] = fact;
                d_[i + 1] -= fact * du_[i];
            } else {
                const double fact = d_[i] / dl_[i];
                d_[i] = dl_[i];
                dl_[i] = fact;
                const double temp = du_[i];
                du_[i] = d_[i + 1];
                d_[i + 1] = temp - fact * d_[i + 1];
                if (i + 2 < n) {
                    du2_[i] = du_[i + 1];
                    du_[i + 1] = -fact * du_[i + 1];
                }
                swap_[i] = true;
            }
        }
        if (n > 0 && d_[n - 1] == 0.0)
            d_[n - 1] = floor;
    }

    void solve_in_place(std::span<double> b) const
    {
        const std::size_t n = d_.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!swap_[i]) {
                b[i + 1] -= dl_[i] * b[i];
            } else {
                const double temp = b[i] - dl_[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            }
        }
        if (n == 0)
            return;
        b[n - 1] /= d_[n - 1];
        if (n > 1)
            b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
        for (std::size_t i = n - 2; i-- > 0;)
            b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
    }

  private:
    std::vector<double> dl_;
    std::vector<double> d_;
    std::vector<double> du_;
    std::vector<double> du2_;
    std::vector<bool> swap_;
};

} // namespace dirac_hardy
