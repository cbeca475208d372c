#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include "dirac_hardy/error.hpp"

namespace dirac_hardy {

// Second, independent oracle: shooting on the first-order radial system
//   P' = -kappa P / r + (E + 1 + nu/r) Q
//   Q' =  kappa Q / r - (E - 1 + nu/r) P
// for V = -nu/r. Outward from the regular solution r^s near 0, inward from
// the decaying solution at large r, matched by the Wronskian at r = 1.

struct ShootingOptions
{
    double r_start = 1e-10;
    double log_step = 5e-4;
    double r_step = 5e-3;
    double decay_lengths = 40.0;
    double scan_step = 5e-3;
    double energy_tol = 1e-12;
};

namespace detail {

using State = std::array<double, 2>;

/// Regular solution at r = 1, integrated in t = ln r.
inline State shoot_out(double nu, int kappa, double e, const ShootingOptions& o)
{
    const double k = kappa;
    const double s = std::sqrt(k * k - nu * nu);
    const double t0 = std::log(o.r_start);
    const int steps = static_cast<int>(std::ceil(-t0 / o.log_step));
    const double dt = -t0 / steps;
    auto f = [&](double t, const State& y) {
        const double r = std::exp(t);
        return State{-k * y[0] + (r * (e + 1.0) + nu) * y[1], k * y[1] - (r * (e - 1.0) + nu) * y[0]};
    };
    State y{1.0, (s + k) / nu};
    double t = t0;
    for (int i = 0; i < steps; ++i) {
        const State a = f(t, y);
        const State b = f(t + 0.5 * dt, {y[0] + 0.5 * dt * a[0], y[1] + 0.5 * dt * a[1]});
        const State c = f(t + 0.5 * dt, {y[0] + 0.5 * dt * b[0], y[1] + 0.5 * dt * b[1]});
        const State d = f(t + dt, {y[0] + dt * c[0], y[1] + dt * c[1]});
        for (int j = 0; j < 2; ++j)
            y[j] += dt / 6.0 * (a[j] + 2.0 * b[j] + 2.0 * c[j] + d[j]);
        t += dt;
        // Rescale to keep the magnitudes bounded; only the direction matters.
        const double m = std::max(std::abs(y[0]), std::abs(y[1]));
        if (m > 1e100) {
            y[0] /= m;
            y[1] /= m;
        }
    }
    return y;
}

/// Decaying solution at r = 1, integrated inward in r.
inline State shoot_in(double nu, int kappa, double e, const ShootingOptions& o)
{
    const double k = kappa;
    const double lambda = std::sqrt(1.0 - e * e);
    const double r_far = std::max(2.0, o.decay_lengths / lambda);
    const int steps = static_cast<int>(std::ceil((r_far - 1.0) / o.r_step));
    const double h = -(r_far - 1.0) / steps;
    auto f = [&](double r, const State& y) {
        return State{-k * y[0] / r + (e + 1.0 + nu / r) * y[1], k * y[1] / r - (e - 1.0 + nu / r) * y[0]};
    };
    State y{1.0, -lambda / (1.0 + e)};
    double r = r_far;
    for (int i = 0; i < steps; ++i) {
        const State a = f(r, y);
        const State b = f(r + 0.5 * h, {y[0] + 0.5 * h * a[0], y[1] + 0.5 * h * a[1]});
        const State c = f(r + 0.5 * h, {y[0] + 0.5 * h * b[0], y[1] + 0.5 * h * b[1]});
        const State d = f(r + h, {y[0] + h * c[0], y[1] + h * c[1]});
        for (int j = 0; j < 2; ++j)
            y[j] += h / 6.0 * (a[j] + 2.0 * b[j] + 2.0 * c[j] + d[j]);
        r += h;
        const double m = std::max(std::abs(y[0]), std::abs(y[1]));
        if (m > 1e100) {
            y[0] /= m;
            y[1] /= m;
        }
    }
    return y;
}

inline double matching_wronskian(double nu, int kappa, double e, const ShootingOptions& o)
{
    State a = shoot_out(nu, kappa, e, o);
    State b = shoot_in(nu, kappa, e, o);
    const double na = std::hypot(a[0], a[1]);
    const double nb = std::hypot(b[0], b[1]);
    return (a[0] * b[1] - a[1] * b[0]) / (na * nb);
}

} // namespace detail

/// k-th level of channel kappa for V = -nu/r by shooting. Intended for the
/// lowest few levels; the scan resolves levels more than scan_step apart.
inline double shooting_eigenvalue(double nu, int kappa, int k, const ShootingOptions& o = {})
{
    if (kappa == 0)
        throw Error(Errc::zero_kappa, "spin-orbit number must be nonzero");
    if (k < 1 || !(nu > 0.0))
        throw Error(Errc::precondition, "need k >= 1 and nu > 0");
    if (nu > std::abs(kappa))
        throw Error(Errc::supercritical_channel, "coupling exceeds |kappa|");

    int found = 0;
    double e_prev = -1.0 + o.scan_step;
    double w_prev = detail::matching_wronskian(nu, kappa, e_prev, o);
    for (double e = e_prev + o.scan_step; e < 1.0 - 0.5 * o.scan_step; e += o.scan_step) {
        const double w = detail::matching_wronskian(nu, kappa, e, o);
        if ((w < 0.0) != (w_prev < 0.0) && ++found == k) {
            double lo = e_prev;
            double hi = e;
            double w_lo = w_prev;
            while (hi - lo > o.energy_tol) {
                const double mid = 0.5 * (lo + hi);
                const double w_mid = detail::matching_wronskian(nu, kappa, mid, o);
                if ((w_mid < 0.0) == (w_lo < 0.0)) {
                    lo = mid;
                    w_lo = w_mid;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        e_prev = e;
        w_prev = w;
    }
    throw Error(Errc::no_eigenvalue, "shooting scan found fewer than k levels");
}

} // namespace dirac_hardy
