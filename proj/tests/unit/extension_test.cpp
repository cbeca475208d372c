#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dirac_hardy/extension.hpp"
#include "dirac_hardy/sampling.hpp"
#include "dirac_hardy/spectrum.hpp"

using namespace dirac_hardy;

namespace {

const RadialGrid& mid_grid()
{
    static const RadialGrid g = build_grid(1e-6, 60.0, 1000, Scheme::log_uniform);
    return g;
}

double max_abs(const std::vector<double>& x)
{
    double m = 0.0;
    for (double v : x)
        m = std::max(m, std::abs(v));
    return m;
}

} // namespace

TEST(Extension, ApplyHIsLinearAtZero)
{
    const RadialGrid& g = mid_grid();
    const SpinorPair out = apply_H(SpinorPair::zero(-1, g), make_coulomb(0.5), g);
    EXPECT_EQ(max_abs(out.phi), 0.0);
    EXPECT_EQ(max_abs(out.chi), 0.0);
}

TEST(Extension, FreeApplyOnSmoothUpperComponent)
{
    // V = 0, chi = 0: G1 = phi and G2 = D_{-1} phi ~ -r e^{-r}.
    auto run = [](std::size_t n) {
        const RadialGrid g = build_grid(1e-3, 30.0, n, Scheme::uniform);
        SpinorPair p = SpinorPair::zero(-1, g);
        for (std::size_t i = 0; i + 1 < g.size(); ++i)
            p.phi[i] = g.nodes()[i] * std::exp(-g.nodes()[i]);
        const SpinorPair out = apply_H(p, make_free(), g);
        double upper = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            upper = std::max(upper, std::abs(out.phi[i] - p.phi[i]));
        EXPECT_LT(upper, 1e-12);
        std::vector<double> err(g.num_samples());
        for (std::size_t s = 0; s < err.size(); ++s)
            err[s] = out.chi[s] + g.sample_r()[s] * std::exp(-g.sample_r()[s]);
        return std::sqrt(ChannelOperator(-1, g).inner_lower(err, err));
    };
    // P1 interpolation: ||(f - I_h f)'|| <= (h/pi) ||f''||, with ||f''|| < 1.2
    // for f = r e^{-r}; the kappa/r term adds h^2/8 max|f''| r_min^{-1/2}.
    const double h = (30.0 - 1e-3) / 399.0;
    const double e1 = run(400);
    const double e2 = run(800);
    EXPECT_LT(e1, h / M_PI * 1.2 + h * h / 8.0 * 2.0 / std::sqrt(1e-3));
    EXPECT_GE(e1 / e2, 1.9);
}

TEST(Extension, GroundStateIsEigenpairOfH)
{
    const RadialGrid g = default_grid();
    const RadialPotential v = make_coulomb(0.5);
    const SpectralResult r = find_eigenvalue(v, -1, 1, g);
    const SpinorPair p{-1, r.phi, r.chi};
    const DiracOperator h(v, -1, g);
    SpinorPair hp = h.apply(p);
    for (std::size_t i = 0; i < hp.phi.size(); ++i)
        hp.phi[i] -= std::sqrt(0.75) * p.phi[i];
    for (std::size_t s = 0; s < hp.chi.size(); ++s)
        hp.chi[s] -= std::sqrt(0.75) * p.chi[s];
    EXPECT_LE(h.norm(hp) / h.norm(p), 1e-3);
}

TEST(Extension, ResolventOfZeroIsZero)
{
    const RadialGrid& g = mid_grid();
    const std::vector<double> f1(g.size(), 0.0);
    const std::vector<double> f2(g.num_samples(), 0.0);
    for (double gamma : {1.1, 1.5}) {
        const ResolventResult r = solve_resolvent(f1, f2, make_coulomb(0.5), gamma, -1, g);
        EXPECT_EQ(max_abs(r.pair.phi), 0.0);
        EXPECT_EQ(max_abs(r.pair.chi), 0.0);
    }
}

TEST(Extension, ResolventRoundtrip)
{
    std::mt19937_64 rng(17);
    const RadialGrid& g = mid_grid();
    for (double nu : {0.5, 0.9, 1.0}) {
        const RadialPotential v = make_coulomb(nu);
        // At nu = 1 the ground state sits at E = 0, so gamma = 1 is singular.
        const double upper = nu < 1.0 ? 1.0 + 0.5 * *v.cV_hint : 0.9;
        for (double gamma : {0.2, 0.7, upper}) {
            for (int t = 0; t < 20; ++t) {
                const auto f1 = random_nodal(rng, g);
                const auto f2 = random_samples(rng, g);
                const ResolventResult r = solve_resolvent(f1, f2, v, gamma, -1, g);
                EXPECT_LE(roundtrip_residual(r.pair, f1, f2, v, gamma, g), 1e-8) << nu << " " << gamma;
                EXPECT_FALSE(r.ill_conditioned);
            }
        }
    }
}

TEST(Extension, LowerComponentSchurIdentity)
{
    // chi - D phi/(gamma - V) = -F2/(gamma - V).
    std::mt19937_64 rng(19);
    const RadialGrid& g = mid_grid();
    const RadialPotential v = make_coulomb(0.5);
    const double gamma = 1.2;
    const auto f1 = random_nodal(rng, g);
    const auto f2 = random_samples(rng, g);
    const ResolventResult r = solve_resolvent(f1, f2, v, gamma, -1, g);
    const auto dphi = ChannelOperator(-1, g).apply(r.pair.phi);
    for (std::size_t s = 0; s < dphi.size(); ++s) {
        const double gap = gamma - v(g.sample_r()[s]);
        EXPECT_NEAR(r.pair.chi[s] - dphi[s] / gap, -f2[s] / gap, 1e-12 * (std::abs(dphi[s] / gap) + 1.0));
    }
}

TEST(Extension, ResolventAtEigenvalueIsFlagged)
{
    const RadialGrid g = default_grid();
    const RadialPotential v = make_coulomb(0.5);
    const SpectralResult e = find_eigenvalue(v, -1, 1, g);
    std::mt19937_64 rng(23);
    const auto f1 = random_nodal(rng, g);
    const auto f2 = random_samples(rng, g);
    for (double gamma : {e.gamma_star, 1.0 + std::sqrt(0.75)}) {
        try {
            const ResolventResult r = solve_resolvent(f1, f2, v, gamma, -1, g);
            EXPECT_TRUE(r.ill_conditioned);
            EXPECT_FALSE(r.warning.empty());
        } catch (const Error& err) {
            EXPECT_EQ(err.code(), Errc::solver_singular);
        }
    }
    // Beyond the ground state the form has a negative direction.
    try {
        solve_resolvent(f1, f2, v, 1.9, -1, g);
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.code(), Errc::solver_singular);
    }
}

TEST(Extension, SymmetryDefect)
{
    std::mt19937_64 rng(29);
    const RadialGrid& g = mid_grid();
    for (double nu : {0.5, 1.0}) {
        const RadialPotential v = make_coulomb(nu);
        const double gamma = nu < 1.0 ? 1.0 + 0.5 * *v.cV_hint : 0.5;
        for (int t = 0; t < 10; ++t) {
            const auto p = solve_resolvent(random_nodal(rng, g), random_samples(rng, g), v, gamma, -1, g).pair;
            const auto q = solve_resolvent(random_nodal(rng, g), random_samples(rng, g), v, gamma, -1, g).pair;
            const SymmetryReport r = symmetry_defect(p, q, v, gamma, g);
            EXPECT_LE(r.defect, 1e-10);
            EXPECT_NEAR(r.schur_representation, r.lhs, 1e-9 * (std::abs(r.lhs) + 1.0));
            EXPECT_LE(symmetry_defect(p, p, v, gamma, g).defect, 1e-14);
        }
    }
}

TEST(Extension, RoughLowerComponentIsSymmetricButFlagged)
{
    std::mt19937_64 rng(31);
    const RadialGrid& g = mid_grid();
    const RadialPotential v = make_coulomb(0.5);
    const double gamma = 1.2;
    const auto smooth = solve_resolvent(random_nodal(rng, g), random_samples(rng, g), v, gamma, -1, g).pair;
    SpinorPair rough = smooth;
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t s = 0; s < rough.chi.size(); ++s)
        rough.chi[s] = noise(rng) / (gamma - v(g.sample_r()[s]));
    const SymmetryReport r = symmetry_defect(rough, smooth, v, gamma, g);
    EXPECT_LE(r.defect, 1e-10);
    EXPECT_GT(std::abs(r.schur_representation_flipped - r.lhs), 1e-6 * std::abs(r.lhs));

    const DomainDiagnostics ds = domain_diagnostics(smooth, v, gamma, default_cutoffs(), g);
    const DomainDiagnostics dr = domain_diagnostics(rough, v, gamma, default_cutoffs(), g);
    EXPECT_GT(dr.schur_defect, 100.0 * ds.schur_defect);
}

TEST(Extension, DiagnosticsOfZero)
{
    const RadialGrid& g = mid_grid();
    const DomainDiagnostics d = domain_diagnostics(SpinorPair::zero(-1, g), make_coulomb(0.5), 0.5, default_cutoffs(), g);
    EXPECT_EQ(d.b_gamma_value, 0.0);
    EXPECT_EQ(d.r_inv_integral, 0.0);
    EXPECT_EQ(d.schur_defect, 0.0);
    EXPECT_EQ(d.residual_upper, 0.0);
    EXPECT_EQ(d.residual_lower, 0.0);
    EXPECT_FALSE(d.r_inv_divergent);
    for (const auto& t : d.r_inv_truncated)
        EXPECT_EQ(t.value, 0.0);
}

TEST(Extension, ChainHoldsForRandomAndGroundStates)
{
    std::mt19937_64 rng(37);
    const RadialGrid g = default_grid();
    for (double nu : {0.5, 0.9}) {
        const RadialPotential v = make_coulomb(nu);
        const double gamma = nu;
        const SpectralResult e = find_eigenvalue(v, -1, 1, g);
        const DomainDiagnostics ground = domain_diagnostics({-1, e.phi, e.chi}, v, gamma, default_cutoffs(), g);
        EXPECT_TRUE(ground.chain_applicable);
        EXPECT_TRUE(ground.chain_holds) << ground.chain_lhs << " > " << ground.chain_rhs;
        EXPECT_FALSE(ground.r_inv_divergent);
        for (int t = 0; t < 20; ++t) {
            SpinorPair p = SpinorPair::zero(-1, g);
            p.phi = random_nodal(rng, g);
            const DomainDiagnostics d = domain_diagnostics(p, v, gamma, {}, g);
            EXPECT_TRUE(d.chain_applicable);
            EXPECT_TRUE(d.chain_holds) << d.chain_lhs << " > " << d.chain_rhs;
        }
    }
}

TEST(Extension, ChainNotApplicableAboveCoupling)
{
    std::mt19937_64 rng(41);
    const RadialGrid& g = mid_grid();
    SpinorPair p = SpinorPair::zero(-1, g);
    p.phi = random_nodal(rng, g);
    EXPECT_FALSE(domain_diagnostics(p, make_coulomb(0.5), 1.2, {}, g).chain_applicable);
    EXPECT_FALSE(domain_diagnostics(p, make_coulomb(1.0), 1.0, {}, g).chain_applicable);
}

TEST(Extension, CriticalGroundStateLogGrowth)
{
    const RadialGrid g = default_grid();
    const RadialPotential v = make_coulomb(1.0);
    const SpectralResult e = find_eigenvalue(v, -1, 1, g);
    const DomainDiagnostics d = domain_diagnostics({-1, e.phi, e.chi}, v, 1.0, default_cutoffs(), g);
    EXPECT_TRUE(d.r_inv_divergent);
    EXPECT_NEAR(d.log_slope, d.slope_reference, 0.2 * d.slope_reference);
    EXPECT_NEAR(d.log_slope, d.log_slope_previous, 0.2 * d.log_slope_previous);
}

TEST(Extension, TruncatedIntegralIsContinuousInCutoff)
{
    std::mt19937_64 rng(43);
    const RadialGrid& g = mid_grid();
    SpinorPair p = SpinorPair::zero(-1, g);
    p.phi = random_nodal(rng, g);
    const ChannelOperator d(-1, g);
    // A cutoff on a node and one just past it agree to first order.
    const double node = g.nodes()[500];
    const double a = detail::truncated_r_inv(d, p.phi, node);
    const double b = detail::truncated_r_inv(d, p.phi, node * (1.0 + 1e-9));
    EXPECT_NEAR(a, b, 1e-6 * std::abs(a) + 1e-12);
    EXPECT_NEAR(detail::truncated_r_inv(d, p.phi, g.r_min()), domain_diagnostics(p, make_coulomb(0.5), 0.5, {}, g).r_inv_integral,
                1e-14);
}
