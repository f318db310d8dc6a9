// SPDX-License-Identifier: MIT
#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "wnkpz/grid.hpp"
#include "wnkpz/io.hpp"

using namespace wnkpz;

namespace {
double sech2(double x) {
    const double s = 1.0 / std::cosh(x);
    return s * s;
}
}  // namespace

TEST(SpaceGrid, RejectsEvenOrTinyPointCounts) {
    EXPECT_THROW(SpaceGrid(1.0, 4), ConfigError);
    EXPECT_THROW(SpaceGrid(1.0, 1), ConfigError);
    EXPECT_THROW(SpaceGrid(0.0, 5), ConfigError);
    EXPECT_NO_THROW(SpaceGrid(1.0, 3));
}

TEST(SpaceGrid, NodesAreExactlySymmetric) {
    const auto g = SpaceGrid::with_spacing(20.0, 0.01);
    ASSERT_EQ(g.size(), 4001u);
    EXPECT_EQ(g.x(g.center()), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.x(i), -g.x(g.size() - 1 - i));
    EXPECT_DOUBLE_EQ(g.x(0), -20.0);
}

TEST(SpaceGrid, NearestThrowsOutsideDomain) {
    const SpaceGrid g(2.0, 41);
    EXPECT_EQ(g.nearest(0.0), g.center());
    EXPECT_EQ(g.nearest(0.26), g.center() + 3);
    EXPECT_THROW((void)g.nearest(2.5), DomainError);
}

TEST(TimeGrid, Invariants) {
    EXPECT_THROW(TimeGrid(1.0, 1.0, 10), ConfigError);
    EXPECT_THROW(TimeGrid(-1.0, 1.0, 10), ConfigError);
    const auto tg = TimeGrid::with_step(0.0, 2.0, 0.01);
    EXPECT_EQ(tg.n_steps(), 200u);
    EXPECT_EQ(tg.index_of(1.5), 150u);
    EXPECT_THROW((void)tg.index_of(1.505), DomainError);
}

TEST(HeatKernel, ClosedFormValues) {
    EXPECT_NEAR(heat_kernel(2.0, 0.0), 0.2820947918, 1e-10);
    EXPECT_NEAR(heat_kernel(1.0, 0.0), 0.3989422804, 1e-10);
    EXPECT_THROW(heat_kernel(0.0, 1.0), DomainError);
    EXPECT_THROW(heat_kernel(-1.0, 1.0), DomainError);
}

TEST(HeatKernel, TrapezoidMassIsOne) {
    const auto g = SpaceGrid::with_spacing(20.0, 0.01);
    for (double t : {0.5, 1.0, 4.0}) {
        const auto p = Potential::sample(g, [t](double x) { return heat_kernel(t, x); });
        double mass = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) mass += g.weight(i) * p[i];
        EXPECT_NEAR(mass, 1.0, 1e-6) << "t = " << t;
    }
}

TEST(Norms, SpaceExamples) {
    const auto g = SpaceGrid::with_spacing(20.0, 0.01);
    EXPECT_NEAR(l2_norm_space(Potential::sample(g, sech2)), std::sqrt(4.0 / 3.0), 1e-6);
    EXPECT_EQ(l2_norm_space(Potential::zero(g)), 0.0);
    const auto ind = Potential::sample(g, [](double x) { return std::abs(x) <= 1.0 + 1e-12 ? 1.0 : 0.0; });
    EXPECT_NEAR(l2_norm_space(ind), std::sqrt(2.0), g.dx());
}

TEST(Norms, AbsolutelyHomogeneous) {
    const auto g = SpaceGrid::with_spacing(10.0, 0.05);
    const auto f = Potential::sample(g, [](double x) { return std::sin(x) * std::exp(-x * x); });
    for (double c : {-3.0, 0.5, 7.0}) {
        EXPECT_NEAR(l2_norm_space(f.scaled(c)), std::abs(c) * l2_norm_space(f), 1e-14);
    }
}

TEST(Norms, SpaceTimeExamples) {
    const auto g = SpaceGrid::with_spacing(20.0, 0.01);
    const auto tg = TimeGrid::with_step(0.0, 2.0, 0.01);
    const auto rho = SpaceTimeDeviation::constant_in_time(tg, Potential::sample(g, sech2));
    EXPECT_NEAR(l2_norm_spacetime(rho), std::sqrt(8.0 / 3.0), 1e-4);
    EXPECT_EQ(l2_norm_spacetime(SpaceTimeDeviation::zero(tg, g)), 0.0);

    const SpaceGrid unit(1.0, 201);
    const auto t1 = TimeGrid::with_step(0.0, 1.0, 0.01);
    const auto c = SpaceTimeDeviation::sample(t1, unit, [](double, double) { return 3.0; });
    EXPECT_NEAR(l2_norm_spacetime(c), 3.0 * std::sqrt(2.0), unit.dx());
}

TEST(Potential, RejectsNonFinite) {
    const SpaceGrid g(1.0, 3);
    EXPECT_THROW(Potential(g, {0.0, std::nan(""), 0.0}), DomainError);
    EXPECT_THROW(Potential(g, {0.0, 1.0}), DomainError);
}

TEST(Potential, LinearInterpolationAndZeroOutside) {
    const SpaceGrid g(1.0, 3);
    const Potential p(g, {0.0, 2.0, 4.0});
    EXPECT_DOUBLE_EQ(p.at(0.5), 3.0);
    EXPECT_DOUBLE_EQ(p.at(-0.25), 1.5);
    EXPECT_EQ(p.at(1.5), 0.0);
}

TEST(FieldIo, CsvAndDescriptor) {
    const SpaceGrid g(1.0, 3);
    const TimeGrid tg(0.0, 1.0, 1);
    const Field f(tg, g, {1.0, 2.0, 3.0, 0.1, 0.2, 0.30000000000000004});
    std::ostringstream os;
    write_field_csv(os, f);
    EXPECT_EQ(os.str(), "t,x,value\n0,-1,1\n0,0,2\n0,1,3\n1,-1,0.1\n1,0,0.2\n1,1,0.3\n");
    const auto d = field_descriptor(f);
    EXPECT_EQ(d["n_points"], 3);
    EXPECT_EQ(d["n_steps"], 1);
    EXPECT_DOUBLE_EQ(d["half_width"].get<double>(), 1.0);
}

TEST(Io, FormatNumberTwelveDigits) {
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(-2.25), "-2.25");
    EXPECT_EQ(format_number(1e-20), "1e-20");
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}
