#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dirac_hardy/channel.hpp"
#include "dirac_hardy/sampling.hpp"

namespace {

// ||(f - I_h f)'|| <= (h/pi) ||f''|| and |f - I_h f| <= h^2/8 max|f''|, so
// ||D(f - I_h f)|| <= (h/pi) ||f''|| + h^2/8 max|f''| ||1/r|| for |kappa| = 1,
// with f = r e^{-r}, f'' = (r - 2) e^{-r}, max|f''| <= 2, ||1/r|| < r_min^{-1/2}.
double interpolation_bound(double r_min, double r_max, std::size_t n)
{
    const auto g = dirac_hardy::build_grid(r_min, r_max, n, dirac_hardy::Scheme::uniform);
    double f2 = 0.0;
    for (std::size_t s = 0; s < g.num_samples(); ++s) {
        const double r = g.sample_r()[s];
        f2 += g.sample_weights()[s] * std::pow((r - 2.0) * std::exp(-r), 2);
    }
    const double h = (r_max - r_min) / static_cast<double>(n - 1);
    return h / M_PI * std::sqrt(f2) + h * h / 8.0 * 2.0 / std::sqrt(r_min);
}

} // namespace

using namespace dirac_hardy;

TEST(Channel, ZeroKappaRejected)
{
    const RadialGrid g = build_grid(1e-3, 10.0, 64, Scheme::uniform);
    try {
        build_channel_operator(0, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::zero_kappa);
    }
}

TEST(Channel, MassRowSumsAreTrapezoidWeights)
{
    const RadialGrid g = build_grid(1e-6, 60.0, 500, Scheme::log_uniform);
    const ChannelOperator d(-1, g);
    const SymTridiagonal& m = d.mass();
    const auto w = g.weights();
    for (std::size_t i = 0; i < m.size(); ++i) {
        double row = m.diag[i];
        if (i > 0)
            row += m.off[i - 1];
        if (i + 1 < m.size())
            row += m.off[i];
        // The last free node also couples to the pinned r_max node.
        const double expected = i + 1 < m.size() ? w[i] : w[i] - g.element_length(i) / 6.0;
        EXPECT_NEAR(row, expected, 1e-12 * w[i]) << i;
    }
}

TEST(Channel, WeightedAdjointIdentity)
{
    std::mt19937_64 rng(11);
    const RadialGrid g = build_grid(1e-5, 30.0, 400, Scheme::log_uniform);
    for (int kappa : {-2, -1, 1, 2}) {
        const ChannelOperator d(kappa, g);
        for (int trial = 0; trial < 20; ++trial) {
            const auto f = random_nodal(rng, g);
            const auto h = random_samples(rng, g);
            const double lhs = d.inner_lower(d.apply(f), h);
            const double rhs = d.inner_upper(f, d.adjoint(h));
            EXPECT_NEAR(lhs, rhs, 1e-11 * (std::abs(lhs) + 1.0));
        }
    }
}

TEST(Channel, MidpointDerivativeIsSecondOrder)
{
    // D_{-1}(r e^{-r}) = -r e^{-r}.
    auto max_error = [](std::size_t n) {
        const RadialGrid g = build_grid(0.1, 10.0, n, Scheme::uniform);
        const ChannelOperator d(-1, g);
        std::vector<double> f(g.size());
        for (std::size_t i = 0; i < f.size(); ++i)
            f[i] = g.nodes()[i] * std::exp(-g.nodes()[i]);
        const auto df = d.apply_midpoint(f);
        double err = 0.0;
        for (std::size_t e = 0; e < df.size(); ++e) {
            const double m = 0.5 * (g.nodes()[e] + g.nodes()[e + 1]);
            err = std::max(err, std::abs(df[e] + m * std::exp(-m)));
        }
        return err;
    };
    // Averaging costs h^2/8 |f''| / r, the difference quotient h^2/24 |f'''|;
    // both peak at r = 0.1 where f'' = 1.9 e^{-0.1} and f''' = 2.9 e^{-0.1}.
    const double h = 9.9 / 200.0;
    const double bound = h * h * std::exp(-0.1) * (1.9 / (8.0 * 0.1) + 2.9 / 24.0);
    const double e1 = max_error(201);
    const double e2 = max_error(401);
    EXPECT_LT(e1, bound);
    EXPECT_GE(e1 / e2, 3.5);
}

TEST(Channel, MidpointDerivativeExactOnQuadratics)
{
    // f = r^2, kappa = 1: the difference quotient is exactly 2 m and the
    // averaged f is m^2 + h^2/4.
    const RadialGrid g = build_grid(1.0, 3.0, 33, Scheme::uniform);
    const ChannelOperator d(1, g);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = g.nodes()[i] * g.nodes()[i];
    const auto df = d.apply_midpoint(f);
    for (std::size_t e = 0; e < df.size(); ++e) {
        const double h = g.element_length(e);
        const double m = 0.5 * (g.nodes()[e] + g.nodes()[e + 1]);
        EXPECT_NEAR(df[e], 3.0 * m + h * h / (4.0 * m), 1e-12);
    }
}

TEST(Channel, GaussSampleDerivativeConverges)
{
    // Pointwise values at Gauss samples are first order; the L2 error halves.
    auto l2_error = [](std::size_t n) {
        const RadialGrid g = build_grid(0.1, 10.0, n, Scheme::uniform);
        const ChannelOperator d(-1, g);
        std::vector<double> f(g.size());
        for (std::size_t i = 0; i < f.size(); ++i)
            f[i] = g.nodes()[i] * std::exp(-g.nodes()[i]);
        const auto df = d.apply(f);
        std::vector<double> err(df.size());
        for (std::size_t s = 0; s < df.size(); ++s)
            err[s] = df[s] + g.sample_r()[s] * std::exp(-g.sample_r()[s]);
        return std::sqrt(d.inner_lower(err, err));
    };
    const double e1 = l2_error(201);
    const double e2 = l2_error(401);
    EXPECT_LT(e1, interpolation_bound(0.1, 10.0, 201));
    EXPECT_GE(e1 / e2, 1.9);
}
