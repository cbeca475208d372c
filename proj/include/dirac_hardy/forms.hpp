#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dirac_hardy/channel.hpp"
#include "dirac_hardy/eigensolver.hpp"
#include "dirac_hardy/error.hpp"
#include "dirac_hardy/grid.hpp"
#include "dirac_hardy/potential.hpp"
#include "dirac_hardy/tridiagonal.hpp"

namespace dirac_hardy {

/// Exact form energy, per unit phi(r_min)^2, of the excised interval
/// (0, r_min) when phi is continued there by its regular profile
/// (r / r_min)^s, s = sqrt(kappa^2 - nu^2), to leading order in r_min.
/// With no Coulomb singularity the regular profile carries no energy.
inline double origin_closure(const RadialPotential& v, int kappa)
{
    if (kappa == 0)
        throw Error(Errc::zero_kappa, "spin-orbit number must be nonzero");
    const double nu = v.nu;
    if (nu == 0.0)
        return 0.0;
    const double k = static_cast<double>(kappa);
    if (nu > std::abs(k))
        throw Error(Errc::supercritical_channel,
                    "coupling " + std::to_string(nu) + " exceeds |kappa| = " + std::to_string(std::abs(kappa)));
    const double s = std::sqrt(std::max(0.0, k * k - nu * nu));
    return (s + k) / nu;
}

namespace detail {

/// E^T W_q diag(coef) E on the free nodes.
inline SymTridiagonal sampled_mass(const ChannelOperator& d, std::span<const double> coef)
{
    const RadialGrid& g = d.grid();
    const std::size_t n = d.free_size();
    SymTridiagonal out(n);
    const auto w = g.sample_weights();
    const auto t = g.sample_t();
    for (std::size_t s = 0; s < g.num_samples(); ++s) {
        const std::size_t e = RadialGrid::element_of(s);
        const double c = w[s] * coef[s];
        const double a = 1.0 - t[s];
        const double b = t[s];
        out.diag[e] += c * a * a;
        if (e + 1 < n) {
            out.diag[e + 1] += c * b * b;
            out.off[e] += c * a * b;
        }
    }
    return out;
}

/// D^T W_q diag(coef) D on the free nodes.
inline SymTridiagonal sampled_kinetic(const ChannelOperator& d, std::span<const double> coef)
{
    const RadialGrid& g = d.grid();
    const std::size_t n = d.free_size();
    SymTridiagonal out(n);
    const auto w = g.sample_weights();
    for (std::size_t s = 0; s < g.num_samples(); ++s) {
        const std::size_t e = RadialGrid::element_of(s);
        const double c = w[s] * coef[s];
        const double a = d.left(s);
        const double b = d.right(s);
        out.diag[e] += c * a * a;
        if (e + 1 < n) {
            out.diag[e + 1] += c * b * b;
            out.off[e] += c * a * b;
        }
    }
    return out;
}

inline bool leq_with_slack(double a, double b, double rel = 1e-12)
{
    return a <= b + rel * std::max({1.0, std::abs(a), std::abs(b)});
}

/// V sampled at the Gauss points, after checking the potential metadata at
/// every node and sample.
inline std::vector<double> checked_samples(const RadialPotential& v, const RadialGrid& g)
{
    auto check = [&](double r, double value) {
        if (!std::isfinite(value))
            throw Error(Errc::precondition, "potential is not finite at r=" + std::to_string(r));
        if (!leq_with_slack(value, v.Gamma))
            throw Error(Errc::precondition, "V(" + std::to_string(r) + ") = " + std::to_string(value) +
                                                " exceeds Gamma = " + std::to_string(v.Gamma));
        if (!leq_with_slack(-v.nu / r - v.c1, value))
            throw Error(Errc::precondition,
                        "V(" + std::to_string(r) + ") is below the lower bound -nu/r - c1");
    };
    for (double r : g.nodes())
        check(r, v(r));
    std::vector<double> out(g.num_samples());
    const auto r = g.sample_r();
    for (std::size_t s = 0; s < out.size(); ++s) {
        out[s] = v(r[s]);
        check(r[s], out[s]);
    }
    return out;
}

} // namespace detail

/// Discretization of
///   b_gamma(phi, phi) = int |D_kappa phi|^2 / (gamma - V) + (2 - gamma + V) |phi|^2 dr
/// on the continuous piecewise linear functions of a grid, plus the origin
/// closure term. The matrix is symmetric by construction.
struct FormMatrix
{
    double gamma = 0.0;
    int kappa = 0;
    std::string potential_id;
    double Gamma = 0.0;
    ChannelOperator channel;
    /// V at the Gauss samples.
    std::vector<double> v_samples;
    /// Kinetic (Schur) part D^T W_q diag(1/(gamma - V)) D.
    SymTridiagonal kinetic;
    /// Mass-potential part E^T W_q diag(2 - gamma + V) E.
    SymTridiagonal mass_potential;
    /// Origin closure coefficient added to the first diagonal entry.
    double origin_term = 0.0;
    /// kinetic + mass_potential + origin term.
    SymTridiagonal matrix;

    const SymTridiagonal& gram() const noexcept { return channel.mass(); }
    const RadialGrid& grid() const noexcept { return channel.grid(); }
    std::size_t free_size() const noexcept { return channel.free_size(); }

    /// b_gamma(u, u) for a nodal vector u (length N, last entry ignored).
    double value(std::span<const double> u) const { return matrix.bilinear(u.first(free_size()), u.first(free_size())); }

    /// ||u||_M^2.
    double norm2(std::span<const double> u) const { return gram().bilinear(u.first(free_size()), u.first(free_size())); }

    /// int |D u|^2 / (gamma - V)^2.
    double weighted_gradient_norm2(std::span<const double> u) const
    {
        const std::vector<double> du = channel.apply(u);
        const auto w = grid().sample_weights();
        double acc = 0.0;
        for (std::size_t s = 0; s < du.size(); ++s) {
            const double q = du[s] / (gamma - v_samples[s]);
            acc += w[s] * q * q;
        }
        return acc;
    }
};

inline FormMatrix assemble_form(const RadialPotential& v, double gamma, int kappa, const RadialGrid& grid)
{
    if (!(gamma > v.Gamma))
        throw Error(Errc::gamma_below_sup,
                    "gamma = " + std::to_string(gamma) + " must exceed sup V = " + std::to_string(v.Gamma));
    FormMatrix f{.gamma = gamma,
                 .kappa = kappa,
                 .potential_id = v.id,
                 .Gamma = v.Gamma,
                 .channel = ChannelOperator(kappa, grid),
                 .v_samples = detail::checked_samples(v, grid),
                 .kinetic = {},
                 .mass_potential = {},
                 .origin_term = 0.0,
                 .matrix = {}};
    const std::size_t ns = grid.num_samples();
    std::vector<double> inv_gap(ns);
    std::vector<double> mass_coef(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        inv_gap[s] = 1.0 / (gamma - f.v_samples[s]);
        mass_coef[s] = 2.0 - gamma + f.v_samples[s];
    }
    f.kinetic = detail::sampled_kinetic(f.channel, inv_gap);
    f.mass_potential = detail::sampled_mass(f.channel, mass_coef);
    f.origin_term = origin_closure(v, kappa);
    f.matrix = f.kinetic.axpy(1.0, f.mass_potential);
    f.matrix.diag[0] += f.origin_term;
    return f;
}

/// Lowest k eigenpairs of matrix u = mu M u. Eigenvectors are nodal vectors
/// of length N (last entry 0), M-orthonormal.
inline std::vector<Eigenpair> lowest_eigenpairs(const FormMatrix& f, std::size_t k, const EigenOptions& opts = {})
{
    if (k < 1 || k > f.grid().size() / 4)
        throw Error(Errc::precondition, "k must lie in [1, N/4], got " + std::to_string(k));
    std::vector<Eigenpair> pairs = lowest_eigenpairs(f.matrix, f.gram(), k, opts);
    for (Eigenpair& p : pairs)
        p.vector.push_back(0.0);
    return pairs;
}

inline double lowest_eigenvalue(const FormMatrix& f)
{
    return lowest_eigenvalues(f.matrix, f.gram(), 1).front();
}

/// d mu / d gamma at an eigenpair: -(int |D u|^2/(gamma - V)^2 + ||u||^2) / ||u||^2.
inline double hellmann_feynman_slope(const FormMatrix& f, std::span<const double> u)
{
    return -(f.weighted_gradient_norm2(u) + f.norm2(u)) / f.norm2(u);
}

// --- Hardy-Dirac verification -------------------------------------------

enum class Verdict { holds, fails, marginal };

inline const char* to_string(Verdict v) noexcept
{
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        case Verdict::marginal: return "marginal";
    }
    return "unknown";
}

inline std::vector<int> default_channels() { return {-1, 1, -2, 2}; }

struct HardyReport
{
    double c_tested = 0.0;
    std::vector<int> channels;
    std::vector<double> mu1_per_channel;
    Verdict verdict = Verdict::fails;
    double tolerance = 0.0;
    std::size_t grid_size = 0;

    double min_mu1() const { return *std::min_element(mu1_per_channel.begin(), mu1_per_channel.end()); }

    /// Channel attaining the smallest mu1.
    int binding_channel() const
    {
        const auto it = std::min_element(mu1_per_channel.begin(), mu1_per_channel.end());
        return channels[static_cast<std::size_t>(it - mu1_per_channel.begin())];
    }
};

inline Verdict classify(double min_mu, double tol)
{
    if (min_mu >= -tol)
        return Verdict::holds;
    if (min_mu >= -10.0 * tol)
        return Verdict::marginal;
    return Verdict::fails;
}

namespace detail {

inline void check_shift(const RadialPotential& v, double c)
{
    if (!(c > -1.0) || !(c < 1.0))
        throw Error(Errc::range_violation, "shift c must lie in (-1, 1), got " + std::to_string(c));
    if (!(v.Gamma < 1.0 + c))
        throw Error(Errc::range_violation, "need sup V < 1 + c");
}

} // namespace detail

/// Checks the Hardy-Dirac inequality with shift c: the form at gamma = 1 + c
/// must be nonnegative in every listed channel, up to tol.
inline HardyReport verify_hardy(const RadialPotential& v, double c, const std::vector<int>& channels,
                                const RadialGrid& grid, double tol = 1e-6)
{
    detail::check_shift(v, c);
    if (channels.empty())
        throw Error(Errc::precondition, "channel list is empty");
    HardyReport report{.c_tested = c,
                       .channels = channels,
                       .mu1_per_channel = {},
                       .verdict = Verdict::fails,
                       .tolerance = tol,
                       .grid_size = grid.size()};
    for (int kappa : channels)
        report.mu1_per_channel.push_back(lowest_eigenvalue(assemble_form(v, 1.0 + c, kappa, grid)));
    report.verdict = classify(report.min_mu1(), tol);
    return report;
}

struct CEstimate
{
    double c = 0.0;
    /// No failing shift below 1 - tol: the form is nonnegative up to the cap.
    bool capped = false;
    std::size_t probes = 0;
};

/// Largest shift c in (-1, 1), to within tol, for which verify_hardy holds.
/// mu1 is strictly decreasing in gamma, so the holding set is an interval
/// and bisection applies.
inline CEstimate estimate_cV(const RadialPotential& v, const RadialGrid& grid, double tol = 1e-4,
                             const std::vector<int>& channels = default_channels(), double verdict_tol = 1e-6)
{
    if (!(tol > 0.0) || !(tol < 0.5))
        throw Error(Errc::precondition, "tol must lie in (0, 0.5)");
    CEstimate out;
    auto holds = [&](double c) {
        ++out.probes;
        for (int kappa : channels) {
            const FormMatrix f = assemble_form(v, 1.0 + c, kappa, grid);
            if (count_below(f.matrix, f.gram(), -verdict_tol) > 0)
                return false;
        }
        return true;
    };

    const double cap = 1.0 - tol;
    const double floor = std::max(-1.0 + tol, v.Gamma - 1.0 + tol);
    if (!(floor < cap))
        throw Error(Errc::no_valid_c, "no admissible shift above sup V - 1");
    if (holds(cap)) {
        out.c = cap;
        out.capped = true;
        return out;
    }

    double lo = std::numeric_limits<double>::quiet_NaN();
    if (v.cV_hint && *v.cV_hint > floor && *v.cV_hint < cap && holds(*v.cV_hint))
        lo = *v.cV_hint;
    for (double c = cap - 0.05; std::isnan(lo) && c >= floor; c -= 0.05)
        if (holds(c))
            lo = c;
    if (std::isnan(lo))
        throw Error(Errc::no_valid_c, "no shift in (-1, 1) gives a nonnegative form");

    double hi = cap;
    if (v.cV_hint && *v.cV_hint > lo && *v.cV_hint < hi) {
        if (holds(*v.cV_hint))
            lo = *v.cV_hint;
        else
            hi = *v.cV_hint;
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (holds(mid))
            lo = mid;
        else
            hi = mid;
    }
    out.c = lo;
    return out;
}

// --- gamma-independence and the delta bound --------------------------------

struct GammaEquivalence
{
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    /// 1/(gamma - V) - 1/(gamma' - V) <= [gamma - gamma']_+ / ((gamma - Gamma)(gamma' - Gamma))
    /// at every node and sample.
    bool pointwise_holds = false;
};

/// Pointwise check of the inequality behind the gamma-equivalence bound.
inline bool gamma_pointwise_bound(const RadialPotential& v, double gamma, double gamma_prime, const RadialGrid& grid)
{
    const double plus = std::max(gamma - gamma_prime, 0.0);
    const double bound = plus / ((gamma - v.Gamma) * (gamma_prime - v.Gamma));
    auto ok = [&](double r) {
        const double value = v(r);
        return detail::leq_with_slack(1.0 / (gamma - value) - 1.0 / (gamma_prime - value), bound);
    };
    for (double r : grid.nodes())
        if (!ok(r))
            return false;
    for (double r : grid.sample_r())
        if (!ok(r))
            return false;
    return true;
}

/// Evaluates b_gamma(u,u) <= b_gamma'(u,u)
///   + [gamma - gamma']_+ (1/((gamma' - Gamma)(gamma - Gamma)) + 1) ||u||^2.
/// The bound as stated holds for gamma >= gamma'; for gamma < gamma' the
/// form is strictly larger at gamma and the check reports false.
inline GammaEquivalence check_gamma_equivalence(std::span<const double> u, const RadialPotential& v, double gamma,
                                                double gamma_prime, int kappa, const RadialGrid& grid)
{
    const FormMatrix fg = assemble_form(v, gamma, kappa, grid);
    const FormMatrix fp = assemble_form(v, gamma_prime, kappa, grid);
    const double plus = std::max(gamma - gamma_prime, 0.0);
    GammaEquivalence out;
    out.lhs = fg.value(u);
    out.rhs = fp.value(u) + plus * (1.0 / ((gamma_prime - v.Gamma) * (gamma - v.Gamma)) + 1.0) * fg.norm2(u);
    out.holds = detail::leq_with_slack(out.lhs, out.rhs);
    out.pointwise_holds = gamma_pointwise_bound(v, gamma, gamma_prime, grid);
    return out;
}

/// delta = (gamma - Gamma)(1 + c - gamma) / (1 + c - Gamma).
inline double delta_lower_bound(const RadialPotential& v, double gamma, double c)
{
    if (!(v.Gamma < gamma) || !(gamma < 1.0 + c))
        throw Error(Errc::range_violation, "need sup V < gamma < 1 + c, got gamma=" + std::to_string(gamma) +
                                               ", c=" + std::to_string(c));
    return (gamma - v.Gamma) * (1.0 + c - gamma) / (1.0 + c - v.Gamma);
}

struct DeltaCertificate
{
    double delta = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    /// 1/(gamma - V) - 1/(1 + c - V) >= delta / (gamma - V)^2 at every node and sample.
    bool pointwise_holds = false;
};

inline bool delta_pointwise_bound(const RadialPotential& v, double gamma, double c, const RadialGrid& grid)
{
    const double delta = delta_lower_bound(v, gamma, c);
    auto ok = [&](double r) {
        const double value = v(r);
        const double gap = gamma - value;
        return detail::leq_with_slack(delta / (gap * gap), 1.0 / gap - 1.0 / (1.0 + c - value));
    };
    for (double r : grid.nodes())
        if (!ok(r))
            return false;
    for (double r : grid.sample_r())
        if (!ok(r))
            return false;
    return true;
}

/// b_gamma(u,u) >= delta (||u||^2 + ||D u / (gamma - V)||^2).
inline DeltaCertificate certify_delta_bound(std::span<const double> u, const RadialPotential& v, double gamma, double c,
                                            int kappa, const RadialGrid& grid)
{
    DeltaCertificate out;
    out.delta = delta_lower_bound(v, gamma, c);
    const FormMatrix f = assemble_form(v, gamma, kappa, grid);
    out.lhs = f.value(u);
    out.rhs = out.delta * (f.norm2(u) + f.weighted_gradient_norm2(u));
    out.holds = detail::leq_with_slack(out.rhs, out.lhs);
    out.pointwise_holds = delta_pointwise_bound(v, gamma, c, grid);
    return out;
}

} // namespace dirac_hardy
