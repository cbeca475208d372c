#pragma once

// Dense reference computations used only by the tests: a Cholesky reduction
// of the generalized problem followed by cyclic Jacobi rotations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dirac_hardy/tridiagonal.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix dense(const dirac_hardy::SymTridiagonal& a)
{
    const std::size_t n = a.size();
    Matrix m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        m[i][i] = a.diag[i];
        if (i + 1 < n)
            m[i][i + 1] = m[i + 1][i] = a.off[i];
    }
    return m;
}

/// Eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> jacobi_eigenvalues(Matrix a)
{
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off += a[p][q] * a[p][q];
        if (off < 1e-30)
            break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300)
                    continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i)
        ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Eigenvalues of A u = mu M u for SPD M, via C = L^{-1} A L^{-T}.
inline std::vector<double> generalized_eigenvalues(const Matrix& a, const Matrix& m)
{
    const std::size_t n = a.size();
    Matrix l(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        double d = m[j][j];
        for (std::size_t k = 0; k < j; ++k)
            d -= l[j][k] * l[j][k];
        l[j][j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m[i][j];
            for (std::size_t k = 0; k < j; ++k)
                s -= l[i][k] * l[j][k];
            l[i][j] = s / l[j][j];
        }
    }
    // Y = L^{-1} A, then C = Y L^{-T} = (L^{-1} Y^T)^T.
    auto lower_solve = [&](Matrix b) {
        for (std::size_t col = 0; col < n; ++col)
            for (std::size_t i = 0; i < n; ++i) {
                double s = b[i][col];
                for (std::size_t k = 0; k < i; ++k)
                    s -= l[i][k] * b[k][col];
                b[i][col] = s / l[i][i];
            }
        return b;
    };
    auto transpose = [&](const Matrix& b) {
        Matrix t(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                t[i][j] = b[j][i];
        return t;
    };
    const Matrix y = lower_solve(a);
    Matrix c = transpose(lower_solve(transpose(y)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            c[i][j] = c[j][i] = 0.5 * (c[i][j] + c[j][i]);
    return jacobi_eigenvalues(c);
}

} // namespace oracle
