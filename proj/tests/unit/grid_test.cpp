#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "dirac_hardy/grid.hpp"
#include "dirac_hardy/potential.hpp"

using namespace dirac_hardy;

namespace {

Errc code_of(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return Errc::precondition;
}

} // namespace

TEST(Grid, RejectsTooFewNodes)
{
    EXPECT_EQ(code_of([] { build_grid(1.0, 3.0, 3, Scheme::uniform); }), Errc::too_few_nodes);
}

TEST(Grid, RejectsBadRange)
{
    EXPECT_EQ(code_of([] { build_grid(0.0, 3.0, 100, Scheme::uniform); }), Errc::invalid_range);
    EXPECT_EQ(code_of([] { build_grid(3.0, 3.0, 100, Scheme::uniform); }), Errc::invalid_range);
    EXPECT_EQ(code_of([] { build_grid(-1.0, 3.0, 100, Scheme::log_uniform); }), Errc::invalid_range);
}

TEST(Grid, UniformSpacingIsConstant)
{
    const RadialGrid g = build_grid(1e-4, 10.0, 1001, Scheme::uniform);
    const double h = (10.0 - 1e-4) / 1000.0;
    const auto r = g.nodes();
    EXPECT_DOUBLE_EQ(r.front(), 1e-4);
    EXPECT_DOUBLE_EQ(r.back(), 10.0);
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
        EXPECT_NEAR(r[i + 1] - r[i], h, 1e-12);
}

TEST(Grid, LogUniformStepIsConstant)
{
    const RadialGrid g = build_grid(1e-6, 60.0, 4000, Scheme::log_uniform);
    const double step = std::log(6e7) / 3999.0;
    const auto r = g.nodes();
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
        EXPECT_NEAR(std::log(r[i + 1]) - std::log(r[i]), step, 1e-12 * step);
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
        ASSERT_LT(r[i], r[i + 1]);
}

TEST(Grid, WeightsSumToLength)
{
    for (Scheme s : {Scheme::uniform, Scheme::log_uniform}) {
        const RadialGrid g = build_grid(1e-6, 60.0, 4000, s);
        const auto w = g.weights();
        for (double x : w)
            EXPECT_GT(x, 0.0);
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        EXPECT_NEAR(total, 60.0 - 1e-6, 1e-6 * 60.0);
        const auto sw = g.sample_weights();
        EXPECT_NEAR(std::accumulate(sw.begin(), sw.end(), 0.0), 60.0 - 1e-6, 1e-12 * 60.0);
    }
}

TEST(Grid, GaussSamplesIntegrateCubicsExactly)
{
    const RadialGrid g = build_grid(0.5, 3.0, 40, Scheme::log_uniform);
    const auto r = g.sample_r();
    const auto w = g.sample_weights();
    double acc = 0.0;
    for (std::size_t s = 0; s < r.size(); ++s)
        acc += w[s] * (r[s] * r[s] * r[s] - 2.0 * r[s]);
    const double exact = (std::pow(3.0, 4) - std::pow(0.5, 4)) / 4.0 - (9.0 - 0.25);
    EXPECT_NEAR(acc, exact, 1e-12);
}

TEST(Potential, CoulombHints)
{
    EXPECT_EQ(*make_coulomb(1.0).cV_hint, 0.0);
    EXPECT_NEAR(*make_coulomb(0.6).cV_hint, 0.8, 1e-15);
    EXPECT_EQ(code_of([] { make_coulomb(1.5); }), Errc::coupling_out_of_range);
    EXPECT_EQ(code_of([] { make_coulomb(0.0); }), Errc::coupling_out_of_range);
}

TEST(Potential, CoulombMetadataMatchesSamples)
{
    const RadialGrid g = default_grid();
    for (double nu : {0.3, 0.6, 1.0}) {
        const RadialPotential v = make_coulomb(nu);
        double max_rv = 0.0;
        double max_v = -1e300;
        for (double r : g.nodes()) {
            max_rv = std::max(max_rv, r * std::abs(v(r)));
            max_v = std::max(max_v, v(r));
        }
        EXPECT_NEAR(max_rv, nu, 1e-12 * nu);
        EXPECT_LE(max_v, 0.0);
        EXPECT_EQ(v.Gamma, 0.0);
        EXPECT_EQ(v.c1, 0.0);
    }
}

TEST(Potential, PerturbedCoulombAdmissibility)
{
    const RadialPotential plain = make_bounded_perturbed_coulomb(0.5, 0.0, 0.0);
    EXPECT_TRUE(plain.is_pure_coulomb());
    EXPECT_DOUBLE_EQ(plain(2.0), -0.25);

    const RadialPotential v = make_bounded_perturbed_coulomb(0.6, 0.5, 0.5);
    EXPECT_TRUE(v.theorem_admissible);
    EXPECT_LE(v(1.0), v.Gamma);
    for (double r : {1e-3, 0.1, 1.0, 10.0}) {
        EXPECT_GE(v(r), -0.6 / r - 0.5 - 1e-15);
        EXPECT_LE(v(r), v.Gamma);
    }
    EXPECT_EQ(code_of([] { make_bounded_perturbed_coulomb(0.6, 1.5, 0.5); }), Errc::theorem_hypothesis_violated);
}
