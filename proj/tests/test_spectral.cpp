// SPDX-License-Identifier: MIT
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "wnkpz/random.hpp"
#include "wnkpz/spectral.hpp"

using namespace wnkpz;

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }
double sech2(double x) { return sech(x) * sech(x); }

const SpaceGrid& fine() {
    static const auto g = SpaceGrid::with_spacing(20.0, 0.01);
    return g;
}

Potential random_smooth(const SpaceGrid& sg, RandomStream& rng) {
    double c[3], a[3], w[3];
    for (int j = 0; j < 3; ++j) {
        c[j] = 6.0 * rng.uniform() - 3.0;
        a[j] = 2.0 * rng.uniform();
        w[j] = 0.3 + 1.5 * rng.uniform();
    }
    return Potential::sample(sg, [&](double x) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j) s += a[j] * std::exp(-(x - c[j]) * (x - c[j]) / (2.0 * w[j] * w[j]));
        return s;
    });
}

}  // namespace

TEST(Rayleigh, SechTrialFunction) {
    const auto g = Potential::sample(fine(), [](double x) { return sech(x) / std::sqrt(2.0); });
    EXPECT_NEAR(rayleigh(g, rho_star(fine())), 0.5, 1e-5);
    EXPECT_NEAR(rayleigh(g, rho_star(fine()).scaled(1.3)), 0.7, 1e-5);
    EXPECT_LE(rayleigh(g, Potential::zero(fine())), 0.0);
}

TEST(GroundState, SechSquared) {
    const auto gs = ground_state(rho_star(fine()));
    EXPECT_NEAR(gs.value, 0.5, 1e-4);
    EXPECT_NEAR(rayleigh(gs.eigenfunction, rho_star(fine())), gs.value, 1e-8);
    EXPECT_NEAR(l2_norm_space(gs.eigenfunction), 1.0, 1e-10);
    for (std::size_t i = 0; i < fine().size(); ++i) EXPECT_GE(gs.eigenfunction[i], 0.0);
}

TEST(GroundState, ZeroPotentialDirichletValue) {
    const double L = fine().half_width();
    EXPECT_NEAR(ground_state(Potential::zero(fine())).value, -std::numbers::pi * std::numbers::pi / (8.0 * L * L), 1e-8);
}

TEST(GroundState, Scaling) {
    for (double a : {0.5, 2.0}) {
        const auto p = Potential::sample(fine(), [a](double x) { return a * a * sech2(a * x); });
        EXPECT_NEAR(ground_state(p).value, a * a * 0.5, 1e-3 * a * a) << "alpha " << a;
    }
}

TEST(GroundState, DominatesTrialRayleighQuotients) {
    const auto sg = SpaceGrid::with_spacing(20.0, 0.02);
    RandomStream rng(5, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto phi = random_smooth(sg, rng);
        const double f = ground_state(phi).value;
        const auto g = random_smooth(sg, rng);
        EXPECT_GE(f, rayleigh(g, phi) - 1e-12);
    }
}

TEST(PotbdBound, Values) {
    EXPECT_NEAR(potbd_bound(rho_star(fine())), 0.5, 1e-6);
    EXPECT_EQ(potbd_bound(Potential::zero(fine())), 0.0);
}

TEST(PotbdBound, HoldsForRandomPotentials) {
    const auto sg = SpaceGrid::with_spacing(20.0, 0.02);
    RandomStream rng(7, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto phi = random_smooth(sg, rng);
        EXPECT_LE(ground_state(phi).value, potbd_bound(phi) + 1e-6) << "trial " << trial;
    }
}

TEST(GroundState, MonotoneAndTranslationInvariant) {
    const auto sg = SpaceGrid::with_spacing(20.0, 0.02);
    RandomStream rng(9, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_smooth(sg, rng);
        const auto b = a.plus(random_smooth(sg, rng));
        EXPECT_LE(ground_state(a).value, ground_state(b).value + 1e-8);
    }
    const auto shifted = Potential::sample(sg, [](double x) { return sech2(x - 2.5); });
    EXPECT_NEAR(ground_state(shifted).value, ground_state(rho_star(sg)).value, 1e-4);
}

TEST(GnsRatio, OptimizersAndGaussian) {
    const double sharp = std::pow(3.0, -0.125);
    EXPECT_NEAR(gns_ratio(Potential::sample(fine(), sech)), sharp, 1e-4);
    EXPECT_NEAR(gns_ratio(Potential::sample(fine(), [](double x) { return sech(x - 3.0); })), sharp, 1e-4);
    EXPECT_LT(gns_ratio(Potential::sample(fine(), [](double x) { return std::exp(-x * x / 2.0); })), sharp - 1e-3);
    EXPECT_THROW(gns_ratio(Potential::zero(fine())), DomainError);
}

TEST(GnsRatio, BoundForRandomFunctions) {
    const auto sg = SpaceGrid::with_spacing(20.0, 0.02);
    RandomStream rng(13, 0);
    const double sharp = std::pow(3.0, -0.125);
    for (int trial = 0; trial < 200; ++trial) EXPECT_LE(gns_ratio(random_smooth(sg, rng)), sharp + 1e-4);
}

TEST(Optimizers, NormsAndRescaling) {
    EXPECT_NEAR(l2_norm_space(r_star(fine())), 1.0, 1e-6);
    EXPECT_NEAR(std::pow(l2_norm_space(rho_star(fine())), 2), 4.0 / 3.0, 1e-6);
    const auto rs = rescale(rho_star(fine()), std::pow(l2_norm_space(rho_star(fine())), -2.0 / 3.0));
    const auto r = r_star(fine());
    for (std::size_t i = 0; i < fine().size(); ++i) ASSERT_NEAR(rs[i], r[i], 1e-8);
}

TEST(LipschitzProbe, Ratios) {
    const auto lp = lipschitz_probe(rho_star(fine()), rho_star(fine()), {0.2, 0.1, 0.05});
    ASSERT_EQ(lp.size(), 3u);
    for (double r : lp) {
        EXPECT_GE(r, 0.5);
        EXPECT_LE(r, 0.8);
    }
    EXPECT_LE(std::abs(lp[2] - lp[0]) / lp[0], 0.1);
    for (double r : lipschitz_probe(rho_star(fine()), Potential::zero(fine()), {0.2, 0.1})) EXPECT_EQ(r, 0.0);

    const auto ind = Potential::sample(fine(), [](double x) { return std::abs(x) <= 1.0 ? 1.0 : 0.0; });
    for (double r : lipschitz_probe(Potential::zero(fine()), ind, {0.2, 0.1, 0.05})) EXPECT_LE(r, 1.0);
}

TEST(StabilityProbe, OptimizerAndFamilies) {
    const auto at_opt = stability_probe(rho_star(fine()));
    EXPECT_LE(at_opt.defect, 1e-4);
    EXPECT_LE(at_opt.distance, 1e-3);

    const auto wide = stability_probe(Potential::sample(fine(), [](double x) { return sech2(x / 2.0); }));
    EXPECT_GT(wide.defect, 0.0);
    EXPECT_GT(wide.distance, 0.0);

    double prev_defect = -1.0;
    double prev_distance = -1.0;
    for (double s : {0.0, 0.25, 0.5}) {
        const auto p = stability_probe(
            Potential::sample(fine(), [s](double x) { return (1.0 - s) * sech2(x) + s * std::exp(-x * x); }));
        EXPECT_GT(p.defect, prev_defect);
        EXPECT_GT(p.distance, prev_distance);
        prev_defect = p.defect;
        prev_distance = p.distance;
    }
    EXPECT_THROW(stability_probe(Potential::sample(fine(), [](double x) { return sech2(x - 1.0); })), DomainError);
}
