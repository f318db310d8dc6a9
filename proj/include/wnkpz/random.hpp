// SPDX-License-Identifier: MIT
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace wnkpz {

/// Philox4x32-10 counter-based generator (Salmon et al. 2011).
/// A 64-bit seed forms the key; the 128-bit counter is (block, stream).
class Philox4x32 {
public:
    using block_type = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    [[nodiscard]] block_type operator()(std::uint64_t block, std::uint64_t stream) const {
        block_type c{static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                     static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        std::array<std::uint32_t, 2> k = key_;
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                k[0] += kW0;
                k[1] += kW1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        }
        return c;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
    std::array<std::uint32_t, 2> key_;
};

/// Sequential view of one Philox stream: uniforms on (0,1) and standard normals.
/// Two streams with different ids never share a counter value.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream) : gen_(seed), stream_(stream) {}

    double uniform() {
        if (pos_ == 2) refill();
        return u_[pos_++];
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    static double to_unit(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    void refill() {
        const auto b = gen_(block_++, stream_);
        u_[0] = to_unit(b[0], b[1]);
        u_[1] = to_unit(b[2], b[3]);
        pos_ = 0;
    }

    Philox4x32 gen_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<double, 2> u_{};
    int pos_ = 2;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace wnkpz
