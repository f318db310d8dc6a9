// SPDX-License-Identifier: MIT
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <gtest/gtest.h>

#include "wnkpz/acceptance.hpp"
#include "wnkpz/bridge_mc.hpp"

using namespace wnkpz;

TEST(BridgeConfig, Validation) {
    EXPECT_THROW((BridgeConfig{0, 10, 1}.validate()), ConfigError);
    EXPECT_THROW((BridgeConfig{10, 1, 1}.validate()), ConfigError);
    EXPECT_EQ(BridgeConfig::for_duration(5, 32.0, 1).n_time_steps, 640u);
    EXPECT_EQ(BridgeConfig::for_duration(5, 0.01, 1).n_time_steps, 2u);
}

TEST(SampleBridge, EndpointsPinned) {
    const auto p = sample_bridge(1.5, -0.5, 2.0, BridgeConfig{1, 50, 3}, 7);
    ASSERT_EQ(p.size(), 51u);
    EXPECT_EQ(p.front(), 1.5);
    EXPECT_EQ(p.back(), -0.5);
    EXPECT_THROW(sample_bridge(0.0, 0.0, 0.0, BridgeConfig{1, 50, 3}), DomainError);
}

TEST(SampleBridge, MidpointMomentsMatchBridgeLaw) {
    const std::size_t n = 100000;
    const BridgeConfig cfg{n, 10, 99};
    double s1 = 0.0, s2 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const double v = sample_bridge(0.0, 0.0, 1.0, cfg, p)[5];
        s1 += v;
        s2 += v * v;
        const double w = sample_bridge(2.0, 0.0, 1.0, cfg, p)[3];
        m1 += w;
        m2 += w * w;
    }
    const double nn = static_cast<double>(n);
    const double var = s2 / nn;
    // Var of v^2 is 2 * 0.25^2 for a centered Gaussian
    EXPECT_NEAR(var, 0.25, 3.0 * std::sqrt(2.0 * 0.0625 / nn));
    const double mean = m1 / nn;
    const double sd = std::sqrt(m2 / nn - mean * mean);
    EXPECT_NEAR(mean, 2.0 * (1.0 - 0.3), 3.0 * sd / std::sqrt(nn));
}

TEST(FkEstimate, ZeroPotentialIsHeatKernel) {
    const auto sg = SpaceGrid::with_spacing(10.0, 0.05);
    for (std::uint64_t seed : {1u, 2u}) {
        const auto e = fk_estimate(Potential::zero(sg), 3.0, 0.5, -0.5, BridgeConfig{100, 20, seed});
        EXPECT_DOUBLE_EQ(e.mean, heat_kernel(3.0, -1.0));
        EXPECT_EQ(e.std_error, 0.0);
    }
}

TEST(FkEstimate, ConstantPotentialFactorizes) {
    const auto sg = SpaceGrid::with_spacing(50.0, 0.05);
    const auto phi = Potential::sample(sg, [](double) { return 0.3; });
    const auto e = fk_estimate(phi, 2.0, 0.0, 0.0, BridgeConfig{200, 40, 5});
    EXPECT_NEAR(e.mean, std::exp(0.6) * heat_kernel(2.0, 0.0), 1e-6);
}

TEST(FkEstimate, SeedDeterminism) {
    const auto sg = SpaceGrid::with_spacing(20.0, 0.05);
    const auto a = fk_estimate(rho_star(sg), 4.0, 0.0, 0.0, BridgeConfig{2000, 80, 42});
    const auto b = fk_estimate(rho_star(sg), 4.0, 0.0, 0.0, BridgeConfig{2000, 80, 42});
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, b.std_error);
}

TEST(FkEstimate, MatchesPdeAtDurationFour) {
    const auto sg = SpaceGrid::with_spacing(20.0, 0.02);
    const auto tg = TimeGrid::with_step(0.0, 4.0, 0.005);
    const double pde = std::exp(log_terminal_value(SpaceTimeDeviation::constant_in_time(tg, rho_star(sg)), 0.0));
    const auto mc = fk_estimate(rho_star(sg), 4.0, 0.0, 0.0, BridgeConfig{1000000, 160, 8});
    EXPECT_NEAR(mc.mean, pde, 3.0 * mc.std_error) << "se " << mc.std_error;
}

TEST(GrowthRate, ZeroPotentialAndLogSpaceSafety) {
    const auto sg = SpaceGrid::with_spacing(20.0, 0.05);
    EXPECT_EQ(growth_rate(Potential::zero(sg), 8.0, 0.0, BridgeConfig{100, 160, 1}), 0.0);
    const double g = growth_rate(rho_star(sg).scaled(40.0), 64.0, 0.0, BridgeConfig::for_duration(200, 64.0, 1));
    EXPECT_TRUE(std::isfinite(g));
    EXPECT_GT(g, 1.0);
}

TEST(GrowthRate, ApproachesGroundStateValue) {
    const auto sg = SpaceGrid::with_spacing(20.0, 0.01);
    std::vector<double> g;
    for (double lambda : {8.0, 16.0, 32.0}) {
        g.push_back(growth_rate(rho_star(sg), lambda, 0.0, BridgeConfig::for_duration(5000, lambda, 3)));
    }
    EXPECT_LT(std::abs(g[1] - 0.5), std::abs(g[0] - 0.5));
    EXPECT_LT(std::abs(g[2] - 0.5), std::abs(g[1] - 0.5));
}

TEST(HittingDensity, NormalizationAndSymmetry) {
    const auto h = compare_hitting(1.0, 1.0, 4.0, 20000, 200, 800, 11);
    EXPECT_NEAR(h.normalization, 1.0, 1e-4);
    EXPECT_LE(h.worst_z, 5.0);
    for (double s : {0.1, 1.0, 3.5}) EXPECT_EQ(hitting_density(s, 1.0, 1.0, 4.0), hitting_density(s, 1.0, -1.0, 4.0));
    EXPECT_EQ(hitting_density(0.0, 1.0, 1.0, 4.0), 0.0);
    EXPECT_EQ(hitting_density(4.5, 1.0, 1.0, 4.0), 0.0);
    EXPECT_GE(hitting_density(1e-6, 1.0, 1.0, 4.0), 0.0);
}

TEST(Laplace, ExponentAndMaximizer) {
    EXPECT_DOUBLE_EQ(laplace_v(0.5, 1.0, 2.0, 3.0), -1.0);
    EXPECT_THROW(laplace_v(0.5, 0.0, 1.0, 1.0), DomainError);
    const auto best = boost::math::tools::brent_find_minima(
        [](double s) { return -laplace_v(0.5, s, 1.0, 0.5); }, 1e-6, 1.0, 40);
    EXPECT_NEAR(best.first, 0.5, 1e-6);
    EXPECT_DOUBLE_EQ(laplace_argmax(0.5, 1.0, 0.5), 0.5);
}

TEST(Laplace, SecondDerivativeIsConcave) {
    const double s = 0.5, h = 1e-4;
    const double fd = (laplace_v(0.5, s + h, 1.0, 0.5) - 2.0 * laplace_v(0.5, s, 1.0, 0.5) + laplace_v(0.5, s - h, 1.0, 0.5)) /
                      (h * h);
    const double exact = laplace_v_second_derivative(0.5, s, 1.0, 0.5);
    EXPECT_LT(exact, 0.0);
    EXPECT_NEAR(fd / exact, 1.0, 1e-4);
}

TEST(Laplace, LimitValues) {
    EXPECT_NEAR(laplace_logmgf(0.5, 2.0, 1.0), -0.75, 1e-14);
    EXPECT_NEAR(laplace_logmgf(0.5, 1.0, 2.0), -0.5, 1e-14);
    EXPECT_NEAR(laplace_integral(0.5, 200.0, 1.0, 0.5), laplace_logmgf(0.5, 1.0, 0.5), 0.02);
}

TEST(Laplace, QuadratureConsistencyAtLargeLambda) {
    RandomStream rng(61, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const double t = 0.5 + 1.5 * rng.uniform();
        const double x = 0.05 + 1.95 * rng.uniform();
        EXPECT_NEAR(laplace_integral(0.5, 400.0, t, x), laplace_logmgf(0.5, t, x), 0.01) << t << " " << x;
    }
}

TEST(HStar, Values) {
    EXPECT_EQ(h_star(1.0, 0.0), 0.5);
    EXPECT_EQ(h_star(2.0, 3.0), -2.25);
    EXPECT_EQ(h_star(1.5, 1.5), -0.75);
    EXPECT_EQ(h_star(1.5, -1.5), -0.75);
    EXPECT_THROW(h_star(0.0, 1.0), DomainError);
}

TEST(ShapeProfile, PdeBackend) {
    const auto p = shape_profile(8.0, 0.5, ShapeBackend::pde);
    EXPECT_LE(p.sup_error, 0.25);
    EXPECT_DOUBLE_EQ(p.ts.front(), 0.5);
    EXPECT_DOUBLE_EQ(p.ts.back(), 2.0);
    EXPECT_NEAR(p.xs.front(), -2.0, 1e-12);
    const std::size_t nx = p.xs.size();
    const std::size_t c = nx / 2;
    for (std::size_t it = 0; it < p.ts.size(); ++it) {
        for (std::size_t j = 0; j < nx; ++j) EXPECT_NEAR(p.at(it, j), p.at(it, nx - 1 - j), 1e-6);
        if (p.ts[it] >= 1.0) {
            EXPECT_NEAR(p.at(it, c), p.ts[it] / 2.0, (std::log(std::sqrt(4.0 * std::numbers::pi * 8.0)) + 2.0) / 8.0);
        }
    }
    ShapeOptions small;
    small.half_width = 5.0;
    EXPECT_THROW(shape_profile(8.0, 0.5, ShapeBackend::pde, small), ConfigError);
    EXPECT_THROW(shape_profile(2.0, 0.5, ShapeBackend::pde), DomainError);
}

TEST(ShapeProfile, McBackendSymmetric) {
    ShapeOptions opts;
    opts.step = 0.5;
    opts.mc_paths = 500;
    const auto p = shape_profile(4.0, 0.5, ShapeBackend::mc, opts);
    const std::size_t nx = p.xs.size();
    for (std::size_t it = 0; it < p.ts.size(); ++it) {
        for (std::size_t j = 0; j < nx; ++j) {
            ASSERT_TRUE(std::isfinite(p.at(it, j)));
            const double se = std::hypot(p.std_errors[it * nx + j], p.std_errors[it * nx + nx - 1 - j]);
            EXPECT_LE(std::abs(p.at(it, j) - p.at(it, nx - 1 - j)), 2.0 * se + 1e-12);
        }
    }
}
