// SPDX-License-Identifier: MIT
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "wnkpz/random.hpp"
#include "wnkpz/variational.hpp"

using namespace wnkpz;

namespace {

double sech2(double x) {
    const double s = 1.0 / std::cosh(x);
    return s * s;
}

RateReport report_for(double lambda, SpaceTimeDeviation rho) {
    return {lambda, 0.0, std::move(rho), 0.0, 0, 0.0, 0.0, true, {}};
}

}  // namespace

TEST(Certificate, ClosedFormValues) {
    EXPECT_NEAR(upper_certificate(16.0, 0.1), 4.0 / 3.0 * 1.21 * 64.0, 1e-9);
    EXPECT_NEAR(upper_certificate(4.0, 1.0), 128.0 / 3.0, 1e-9);
    EXPECT_NEAR(upper_certificate(4.0, 1e-3) / 8.0, 4.0 / 3.0, 3e-3);
    EXPECT_THROW(upper_certificate(4.0, 0.0), DomainError);
}

TEST(MinimizerDistance, Examples) {
    RateOptions opts;
    const auto tg = TimeGrid::with_step(0.0, 8.0, opts.dt);
    const auto sg = SpaceGrid::with_spacing(opts.half_width, opts.dx);
    EXPECT_EQ(minimizer_distance(report_for(4.0, SpaceTimeDeviation::constant_in_time(tg, rho_star(sg)))), 0.0);
    EXPECT_NEAR(minimizer_distance(report_for(4.0, SpaceTimeDeviation::zero(tg, sg))), 4.0 / 3.0, 1e-4);
}

TEST(RatePhi, RejectsLambdaOutsideDeskScale) {
    EXPECT_THROW(rate_phi(0.5), DomainError);
    EXPECT_THROW(rate_phi(40.0), DomainError);
}

TEST(RatePhi, ZeroTargetGivesZeroMinimizer) {
    const auto sg = SpaceGrid::with_spacing(10.0, 0.05);
    const auto tg = TimeGrid::with_step(0.0, 2.0, 0.01);
    const double target = log_terminal_value(SpaceTimeDeviation::zero(tg, sg), 0.0);
    RandomStream rng(41, 0);
    const auto init = SpaceTimeDeviation::sample(tg, sg, [&](double, double x) {
        return 0.05 * rng.uniform() * std::exp(-x * x / 4.0);
    });
    const auto m = minimize_deviation(init, target, 1.0, RateOptions{});
    EXPECT_LE(l2_norm_spacetime(m.rho), 1e-3);
    EXPECT_GE(m.residual, -1e-6);
}

TEST(RatePhi, LambdaFourReportInvariants) {
    const auto r = rate_phi(4.0);
    EXPECT_TRUE(r.converged);
    EXPECT_GE(r.constraint_residual, -1e-6);
    EXPECT_LE(r.phi_hat, r.upper_certificate + 1e-6);
    EXPECT_TRUE(std::isfinite(r.phi_hat));
    EXPECT_GT(r.phi_hat, 0.0);

    const auto& m = r.minimizer;
    const std::size_t n = m.sgrid().size();
    double top = 0.0;
    double asym = 0.0;
    for (std::size_t k = 0; k < m.rows(); ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            top = std::max(top, std::abs(m(k, i)));
            asym = std::max(asym, std::abs(m(k, i) - m(k, n - 1 - i)));
        }
    }
    EXPECT_LE(asym, 1e-10 * std::max(1.0, top));

    RateOptions half;
    half.init = RateInit::half_rho_star;
    const auto r2 = rate_phi(4.0, half);
    EXPECT_NEAR(r2.phi_hat / r.phi_hat, 1.0, 0.02);
}

TEST(RatePhi, ScaledOptimizerCandidateIsFeasible) {
    RateOptions opts;
    for (double lambda : {4.0, 8.0}) {
        const auto tg = TimeGrid::with_step(0.0, 2.0 * lambda, opts.dt);
        const auto sg = SpaceGrid::with_spacing(opts.half_width, opts.dx);
        const auto rho = SpaceTimeDeviation::constant_in_time(tg, rho_star(sg).scaled(1.1));
        EXPECT_GE(log_terminal_value(rho, 0.0), tail_target(lambda));
        EXPECT_NEAR(l2_norm_spacetime_sq(rho) / (2.0 * lambda), 4.0 / 3.0 * 1.21, 1e-4);
    }
}

TEST(Equicontinuity, IdenticalFieldsGiveZero) {
    const auto sg = SpaceGrid::with_spacing(20.0, 0.05);
    const auto tg = TimeGrid::with_step(0.0, 8.0, 0.01);
    const auto rho = SpaceTimeDeviation::constant_in_time(tg, rho_star(sg));
    EXPECT_EQ(equicontinuity_probe(rho, rho, 4.0, 1.0, 0.0).lhs, 0.0);
}

TEST(Equicontinuity, ScaledFamilyRatioBounded) {
    const auto sg = SpaceGrid::with_spacing(20.0, 0.05);
    const auto tg = TimeGrid::with_step(0.0, 8.0, 0.01);
    const auto rho = SpaceTimeDeviation::constant_in_time(tg, rho_star(sg));
    double worst = 0.0;
    for (double d : {0.2, 0.1, 0.05}) {
        const auto p = equicontinuity_probe(rho, rho.scaled(1.0 + d), 4.0, 1.0, 0.0);
        ASSERT_GT(p.modulus, 0.0);
        worst = std::max(worst, p.lhs / p.modulus);
    }
    EXPECT_TRUE(std::isfinite(worst));
    RecordProperty("max_ratio", std::to_string(worst));
    EXPECT_THROW(equicontinuity_probe(rho, rho.scaled(3.0), 4.0, 1.0, 0.0), DomainError);
}

TEST(Equicontinuity, LocalizedPerturbationDecaysWithLambda) {
    const auto sg = SpaceGrid::with_spacing(20.0, 0.05);
    std::vector<double> lhs;
    for (double lambda : {4.0, 8.0, 16.0}) {
        const auto tg = TimeGrid::with_step(0.0, 2.0 * lambda, 0.01);
        const auto r1 = SpaceTimeDeviation::constant_in_time(tg, rho_star(sg));
        const auto r2 = SpaceTimeDeviation::sample(tg, sg, [](double t, double x) {
            return sech2(x) * (t < 1.0 ? 1.5 : 1.0);
        });
        lhs.push_back(equicontinuity_probe(r1, r2, lambda, 1.0, 0.0).lhs);
    }
    for (std::size_t j = 1; j < lhs.size(); ++j) EXPECT_LE(lhs[j], lhs[j - 1] / std::sqrt(2.0) * 1.2) << j;
}
