#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dirac_hardy/channel.hpp"
#include "dirac_hardy/error.hpp"
#include "dirac_hardy/forms.hpp"
#include "dirac_hardy/grid.hpp"
#include "dirac_hardy/potential.hpp"
#include "dirac_hardy/tridiagonal.hpp"

namespace dirac_hardy {

/// Radial spinor in channel kappa. phi is nodal (length N, phi.back() == 0);
/// chi lives at the Gauss samples (length 4(N-1)).
struct SpinorPair
{
    int kappa = -1;
    std::vector<double> phi;
    std::vector<double> chi;

    static SpinorPair zero(int kappa, const RadialGrid& grid)
    {
        return {kappa, std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.num_samples(), 0.0)};
    }
};

namespace detail {

inline void check_pair(const SpinorPair& p, const RadialGrid& grid)
{
    if (p.phi.size() != grid.size() || p.chi.size() != grid.num_samples())
        throw Error(Errc::precondition, "spinor pair does not match the grid");
    for (double x : p.phi)
        if (!std::isfinite(x))
            throw Error(Errc::precondition, "phi is not finite");
    for (double x : p.chi)
        if (!std::isfinite(x))
            throw Error(Errc::precondition, "chi is not finite");
    if (p.phi.back() != 0.0)
        throw Error(Errc::precondition, "phi must vanish at r_max");
}

inline double pair_norm2(const ChannelOperator& d, std::span<const double> phi, std::span<const double> chi)
{
    return d.inner_upper(phi, phi) + d.inner_lower(chi, chi);
}

} // namespace detail

/// The operator H = H_0 + V in one channel, assembled once per potential and
/// grid. The upper potential block carries the origin closure, so the
/// operator does not depend on gamma.
class DiracOperator
{
public:
    DiracOperator(const RadialPotential& v, int kappa, const RadialGrid& grid)
        : channel_(kappa, grid), v_samples_(detail::checked_samples(v, grid)), Gamma_(v.Gamma)
    {
        std::vector<double> shifted(v_samples_.size());
        for (std::size_t s = 0; s < shifted.size(); ++s)
            shifted[s] = v_samples_[s] + 1.0;
        upper_ = detail::sampled_mass(channel_, shifted);
        upper_.diag[0] += origin_closure(v, kappa);
    }

    const ChannelOperator& channel() const noexcept { return channel_; }
    const RadialGrid& grid() const noexcept { return channel_.grid(); }
    int kappa() const noexcept { return channel_.kappa(); }
    std::span<const double> v_samples() const noexcept { return v_samples_; }
    double Gamma() const noexcept { return Gamma_; }

    /// (G1, G2) = H (phi, chi). G1 is nodal with G1.back() == 0.
    SpinorPair apply(const SpinorPair& p) const
    {
        detail::check_pair(p, grid());
        const std::size_t n = channel_.free_size();
        std::vector<double> b = upper_.apply(std::span<const double>(p.phi).first(n));
        const std::vector<double> dt = channel_.weak_adjoint(p.chi);
        for (std::size_t i = 0; i < n; ++i)
            b[i] += dt[i];
        b.push_back(0.0);
        SpinorPair out{p.kappa, channel_.solve_mass(std::move(b)), channel_.apply(p.phi)};
        for (std::size_t s = 0; s < out.chi.size(); ++s)
            out.chi[s] += (v_samples_[s] - 1.0) * p.chi[s];
        return out;
    }

    /// (H + 1 - gamma) p.
    SpinorPair apply_shifted(const SpinorPair& p, double gamma) const
    {
        SpinorPair out = apply(p);
        for (std::size_t i = 0; i < out.phi.size(); ++i)
            out.phi[i] += (1.0 - gamma) * p.phi[i];
        for (std::size_t s = 0; s < out.chi.size(); ++s)
            out.chi[s] += (1.0 - gamma) * p.chi[s];
        return out;
    }

    /// <p, q> in the discrete L^2 (consistent mass above, Gauss weights below).
    double inner(const SpinorPair& p, const SpinorPair& q) const
    {
        return channel_.inner_upper(p.phi, q.phi) + channel_.inner_lower(p.chi, q.chi);
    }

    double norm(const SpinorPair& p) const { return std::sqrt(std::max(0.0, inner(p, p))); }

private:
    ChannelOperator channel_;
    std::vector<double> v_samples_;
    double Gamma_ = 0.0;
    SymTridiagonal upper_;
};

inline SpinorPair apply_H(const SpinorPair& p, const RadialPotential& v, const RadialGrid& grid)
{
    return DiracOperator(v, p.kappa, grid).apply(p);
}

struct ResolventResult
{
    SpinorPair pair;
    /// mu1 of the form matrix is within 1e-6 of zero or below: the solve is
    /// close to an eigenvalue and the answer may be inaccurate.
    bool ill_conditioned = false;
    std::string warning;
};

/// Solves (H + 1 - gamma)(phi, chi) = (F1, F2). The upper component solves
/// A_gamma phi = M F1 + D^T W (F2 / (gamma - V)) with the SPD form matrix,
/// then chi = (D phi - F2) / (gamma - V).
inline ResolventResult solve_resolvent(std::span<const double> f1, std::span<const double> f2, const RadialPotential& v,
                                       double gamma, int kappa, const RadialGrid& grid)
{
    const FormMatrix form = assemble_form(v, gamma, kappa, grid);
    const ChannelOperator& d = form.channel;
    const std::size_t n = d.free_size();
    if (f1.size() != grid.size() || f2.size() != grid.num_samples())
        throw Error(Errc::precondition, "right-hand side does not match the grid");

    std::vector<double> scaled(f2.size());
    for (std::size_t s = 0; s < scaled.size(); ++s)
        scaled[s] = f2[s] / (gamma - form.v_samples[s]);
    std::vector<double> rhs = form.gram().apply(f1.first(n));
    const std::vector<double> dt = d.weak_adjoint(scaled);
    for (std::size_t i = 0; i < n; ++i)
        rhs[i] += dt[i];

    const TridiagonalCholesky chol(form.matrix);
    if (!chol.positive_definite())
        throw Error(Errc::solver_singular, "form matrix is not positive definite at gamma = " + std::to_string(gamma));
    chol.solve_in_place(rhs);
    rhs.push_back(0.0);

    ResolventResult out;
    out.pair.kappa = kappa;
    out.pair.phi = std::move(rhs);
    out.pair.chi = d.apply(out.pair.phi);
    for (std::size_t s = 0; s < out.pair.chi.size(); ++s)
        out.pair.chi[s] = (out.pair.chi[s] - f2[s]) / (gamma - form.v_samples[s]);
    if (count_below(form.matrix, form.gram(), 1e-6) > 0) {
        out.ill_conditioned = true;
        out.warning = "lowest form eigenvalue below 1e-6 at gamma = " + std::to_string(gamma);
    }
    return out;
}

/// ||(H + 1 - gamma) p - (F1, F2)|| / ||(F1, F2)||. The r_max entry of F1
/// is not a degree of freedom and is left out. Absolute when F is zero.
inline double roundtrip_residual(const SpinorPair& p, std::span<const double> f1, std::span<const double> f2,
                                 const RadialPotential& v, double gamma, const RadialGrid& grid)
{
    const DiracOperator h(v, p.kappa, grid);
    SpinorPair r = h.apply_shifted(p, gamma);
    const std::size_t n = grid.size() - 1;
    for (std::size_t i = 0; i < n; ++i)
        r.phi[i] -= f1[i];
    for (std::size_t s = 0; s < r.chi.size(); ++s)
        r.chi[s] -= f2[s];
    std::vector<double> f1_free(f1.begin(), f1.end());
    f1_free.back() = 0.0;
    const double scale = std::sqrt(detail::pair_norm2(h.channel(), f1_free, f2));
    const double res = h.norm(r);
    return scale > 0.0 ? res / scale : res;
}

struct SymmetryReport
{
    /// |<Lp, q> - <p, Lq>| / max(||Lp|| ||q||, ||p|| ||Lq||), L = H + 1 - gamma.
    double defect = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    /// b_gamma(phi, phi~) + ((V - gamma)[chi - D phi/(gamma - V)], [chi~ - D phi~/(gamma - V)]).
    /// Equals lhs and rhs.
    double schur_representation = 0.0;
    /// The same with the second term's sign flipped; differs in general.
    double schur_representation_flipped = 0.0;
};

inline SymmetryReport symmetry_defect(const SpinorPair& p, const SpinorPair& q, const RadialPotential& v, double gamma,
                                      const RadialGrid& grid)
{
    if (p.kappa != q.kappa)
        throw Error(Errc::precondition, "pairs belong to different channels");
    const DiracOperator h(v, p.kappa, grid);
    const SpinorPair lp = h.apply_shifted(p, gamma);
    const SpinorPair lq = h.apply_shifted(q, gamma);

    SymmetryReport out;
    out.lhs = h.inner(lp, q);
    out.rhs = h.inner(p, lq);
    const double scale = std::max(h.norm(lp) * h.norm(q), h.norm(p) * h.norm(lq));
    out.defect = scale > 0.0 ? std::abs(out.lhs - out.rhs) / scale : 0.0;

    const FormMatrix form = assemble_form(v, gamma, p.kappa, grid);
    const std::size_t n = form.free_size();
    const double b = form.matrix.bilinear(std::span<const double>(p.phi).first(n), std::span<const double>(q.phi).first(n));
    const std::vector<double> dp = form.channel.apply(p.phi);
    const std::vector<double> dq = form.channel.apply(q.phi);
    const auto w = grid.sample_weights();
    double weighted = 0.0;
    for (std::size_t s = 0; s < dp.size(); ++s) {
        const double gap = gamma - form.v_samples[s];
        weighted += w[s] * gap * (p.chi[s] - dp[s] / gap) * (q.chi[s] - dq[s] / gap);
    }
    out.schur_representation = b - weighted;
    out.schur_representation_flipped = b + weighted;
    return out;
}

// --- domain diagnostics --------------------------------------------------

struct TruncatedIntegral
{
    double cutoff = 0.0;
    double value = 0.0;
};

struct DomainDiagnostics
{
    double b_gamma_value = 0.0;
    /// int_{r_min}^{r_max} phi^2 / r.
    double r_inv_integral = 0.0;
    /// The truncated integrals still grow like log(1/r') at the smallest cutoffs.
    bool r_inv_divergent = false;
    std::vector<TruncatedIntegral> r_inv_truncated;
    /// d/d log(1/r') of the truncated integral, fitted over the last decade
    /// of cutoffs and over the decade before it.
    double log_slope = 0.0;
    double log_slope_previous = 0.0;
    /// phi(r_min)^2, the slope expected when phi tends to a constant at 0.
    double slope_reference = 0.0;
    /// int (gamma - V) [chi - D phi/(gamma - V)]^2.
    double schur_defect = 0.0;
    /// ||G1||, ||G2|| for (G1, G2) = H (phi, chi).
    double residual_upper = 0.0;
    double residual_lower = 0.0;

    /// (1 - nu^2) int phi^2/r <= nu b_gamma + (1 + nu (gamma - 2)) ||phi||^2,
    /// with nu = max r |V|. Checked only when the hypotheses apply.
    double chain_nu = 0.0;
    bool chain_applicable = false;
    double chain_lhs = 0.0;
    double chain_rhs = 0.0;
    bool chain_holds = false;
};

namespace detail {

/// int_{cut}^{r_max} phi^2 / r with Gauss quadrature on the partial element.
inline double truncated_r_inv(const ChannelOperator& d, std::span<const double> phi, double cut)
{
    const RadialGrid& g = d.grid();
    const auto nodes = g.nodes();
    cut = std::clamp(cut, g.r_min(), g.r_max());
    const std::size_t first = static_cast<std::size_t>(std::upper_bound(nodes.begin(), nodes.end(), cut) - nodes.begin());
    const std::size_t e0 = first == 0 ? 0 : first - 1;
    const auto sr = g.sample_r();
    const auto sw = g.sample_weights();
    const std::vector<double> u = d.interpolate(phi);
    double acc = 0.0;
    for (std::size_t s = GaussRule::points * (e0 + 1); s < sr.size(); ++s)
        acc += sw[s] * u[s] * u[s] / sr[s];
    if (e0 < g.num_elements()) {
        const double a = cut;
        const double b = nodes[e0 + 1];
        const double h = g.element_length(e0);
        for (std::size_t q = 0; q < GaussRule::points; ++q) {
            const double r = a + GaussRule::abscissae[q] * (b - a);
            const double t = (r - nodes[e0]) / h;
            const double val = (1.0 - t) * phi[e0] + t * phi[e0 + 1];
            acc += GaussRule::weights[q] * (b - a) * val * val / r;
        }
    }
    return acc;
}

/// Least-squares slope of value against log(1/cutoff) over the given entries.
inline double log_slope(std::span<const TruncatedIntegral> pts)
{
    if (pts.size() < 2)
        return 0.0;
    double mx = 0.0;
    double my = 0.0;
    for (const auto& p : pts) {
        mx += -std::log(p.cutoff);
        my += p.value;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& p : pts) {
        const double x = -std::log(p.cutoff) - mx;
        sxx += x * x;
        sxy += x * (p.value - my);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

} // namespace detail

/// Cutoffs from 1e-1 down to 1e-5, four per decade.
inline std::vector<double> default_cutoffs()
{
    std::vector<double> out;
    for (int i = 0; i <= 16; ++i)
        out.push_back(std::pow(10.0, -1.0 - 0.25 * i));
    return out;
}

inline DomainDiagnostics domain_diagnostics(const SpinorPair& p, const RadialPotential& v, double gamma,
                                            std::vector<double> cutoffs, const RadialGrid& grid)
{
    const FormMatrix form = assemble_form(v, gamma, p.kappa, grid);
    const DiracOperator h(v, p.kappa, grid);
    detail::check_pair(p, grid);
    const ChannelOperator& d = form.channel;

    DomainDiagnostics out;
    out.b_gamma_value = form.value(p.phi);
    out.r_inv_integral = detail::truncated_r_inv(d, p.phi, grid.r_min());
    out.slope_reference = p.phi.front() * p.phi.front();

    std::sort(cutoffs.begin(), cutoffs.end(), std::greater<>());
    for (double c : cutoffs)
        out.r_inv_truncated.push_back({c, detail::truncated_r_inv(d, p.phi, c)});
    if (!cutoffs.empty()) {
        const double smallest = cutoffs.back();
        std::vector<TruncatedIntegral> last;
        std::vector<TruncatedIntegral> previous;
        for (const auto& t : out.r_inv_truncated) {
            if (t.cutoff <= 10.0 * smallest * (1.0 + 1e-12))
                last.push_back(t);
            if (t.cutoff >= 10.0 * smallest * (1.0 - 1e-12) && t.cutoff <= 100.0 * smallest * (1.0 + 1e-12))
                previous.push_back(t);
        }
        out.log_slope = std::max(0.0, detail::log_slope(last));
        out.log_slope_previous = std::max(0.0, detail::log_slope(previous));
        out.r_inv_divergent = out.r_inv_integral > 0.0 && out.log_slope > 1e-3 * out.r_inv_integral;
    }

    const std::vector<double> dp = d.apply(p.phi);
    const auto w = grid.sample_weights();
    for (std::size_t s = 0; s < dp.size(); ++s) {
        const double gap = gamma - form.v_samples[s];
        const double q = p.chi[s] - dp[s] / gap;
        out.schur_defect += w[s] * gap * q * q;
    }

    const SpinorPair g = h.apply(p);
    out.residual_upper = std::sqrt(std::max(0.0, d.inner_upper(g.phi, g.phi)));
    out.residual_lower = std::sqrt(std::max(0.0, d.inner_lower(g.chi, g.chi)));

    // The chain uses nu/(1 + 1/r) <= nu^2/(gamma - V); for V <= 0 with
    // r |V| <= nu this needs gamma - V <= nu (1 + 1/r) pointwise.
    const auto sr = grid.sample_r();
    bool nonpositive = true;
    bool pointwise = true;
    for (std::size_t s = 0; s < sr.size(); ++s) {
        const double vs = form.v_samples[s];
        nonpositive = nonpositive && vs <= 0.0;
        out.chain_nu = std::max(out.chain_nu, sr[s] * std::abs(vs));
    }
    for (std::size_t s = 0; s < sr.size(); ++s)
        pointwise = pointwise && detail::leq_with_slack(gamma - form.v_samples[s], out.chain_nu * (1.0 + 1.0 / sr[s]));
    out.chain_applicable = nonpositive && pointwise && out.chain_nu < 1.0;
    const double nu = out.chain_nu;
    out.chain_lhs = (1.0 - nu * nu) * out.r_inv_integral;
    out.chain_rhs = nu * out.b_gamma_value + (1.0 + nu * (gamma - 2.0)) * form.norm2(p.phi);
    out.chain_holds = detail::leq_with_slack(out.chain_lhs, out.chain_rhs, 1e-10);
    return out;
}

} // namespace dirac_hardy
