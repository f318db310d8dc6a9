// SPDX-License-Identifier: MIT
#include <cmath>
#include <cstdint>
#include <limits>

#include <gtest/gtest.h>

#include "wnkpz/random.hpp"

using namespace wnkpz;

TEST(Philox, KnownAnswerVectors) {
    const Philox4x32 zero(0);
    const auto a = zero(0, 0);
    EXPECT_EQ(a[0], 0x6627e8d5u);
    EXPECT_EQ(a[1], 0xe169c58du);
    EXPECT_EQ(a[2], 0xbc57ac4cu);
    EXPECT_EQ(a[3], 0x9b00dbd8u);

    constexpr auto ones = std::numeric_limits<std::uint64_t>::max();
    const Philox4x32 full(ones);
    const auto b = full(ones, ones);
    EXPECT_EQ(b[0], 0x408f276du);
    EXPECT_EQ(b[1], 0x41c83b0eu);
    EXPECT_EQ(b[2], 0xa20bc7c6u);
    EXPECT_EQ(b[3], 0x6d5451fdu);
}

TEST(RandomStream, DeterministicPerSeedAndStream) {
    RandomStream a(42, 7);
    RandomStream b(42, 7);
    RandomStream c(42, 8);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.normal();
        EXPECT_EQ(x, b.normal());
        differs = differs || x != c.normal();
    }
    EXPECT_TRUE(differs);
}

TEST(RandomStream, UniformMomentsAndRange) {
    RandomStream r(1, 0);
    const int n = 200000;
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        s += u;
        s2 += u * u;
    }
    EXPECT_NEAR(s / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 1e-3);
}

TEST(RandomStream, NormalMoments) {
    RandomStream r(2, 0);
    const int n = 200000;
    double s = 0.0;
    double s2 = 0.0;
    double s4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
    EXPECT_NEAR(s4 / n, 3.0, 5.0 * std::sqrt(96.0 / n));
}
