// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wnkpz/error.hpp"
#include "wnkpz/forward_solver.hpp"
#include "wnkpz/grid.hpp"

namespace wnkpz {

struct SDFlag {
    bool is_sd;
    double max_violation;
};

namespace detail {
inline void require_nonnegative(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (x < 0.0) throw DomainError(std::string(what) + ": negative input");
    }
}
}  // namespace detail

/// Discrete symmetric decreasing rearrangement.
///
/// Node values are sorted in descending order; the largest goes to x = 0 and
/// the pair (v[2k-1], v[2k]) fills the shell {-k dx, +k dx} with their
/// root-mean-square, so every shell is exactly symmetric and the discrete L2
/// norm is unchanged.
inline Potential sym_decr_rearrange(const Potential& f) {
    detail::require_nonnegative(f.values(), "sym_decr_rearrange");
    const std::size_t n = f.size();
    const std::size_t c = f.grid().center();
    std::vector<double> v(f.values().begin(), f.values().end());
    std::sort(v.begin(), v.end(), std::greater<>());
    std::vector<double> out(n);
    out[c] = v[0];
    for (std::size_t k = 1; k <= c; ++k) {
        const double a = v[2 * k - 1];
        const double b = v[2 * k];
        const double s = (a == b) ? a : std::sqrt(0.5 * (a * a + b * b));
        out[c - k] = s;
        out[c + k] = s;
    }
    return Potential(f.grid(), std::move(out));
}

inline SDFlag is_symmetric_decreasing(const Potential& f, double tolerance = 1e-10) {
    const std::size_t c = f.grid().center();
    double worst = 0.0;
    for (std::size_t k = 1; k <= c; ++k) {
        worst = std::max(worst, std::abs(f[c + k] - f[c - k]));
        worst = std::max(worst, f[c + k] - f[c + k - 1]);
        worst = std::max(worst, f[c - k] - f[c - k + 1]);
    }
    return {worst <= tolerance, worst};
}

/// Steiner symmetrization in space: every time slice rearranged independently.
inline SpaceTimeDeviation steiner(const SpaceTimeDeviation& rho) {
    detail::require_nonnegative(rho.values(), "steiner");
    const std::size_t n = rho.sgrid().size();
    std::vector<double> out(rho.values().size());
    for (std::size_t k = 0; k < rho.rows(); ++k) {
        const auto s = sym_decr_rearrange(rho.slice(k));
        std::copy(s.values().begin(), s.values().end(), out.begin() + static_cast<std::ptrdiff_t>(k * n));
    }
    return SpaceTimeDeviation(rho.tgrid(), rho.sgrid(), std::move(out));
}

struct InequalitySides {
    double lhs;
    double rhs;
};

/// (int f g, int f* g*) by the trapezoid rule.
inline InequalitySides hardy_littlewood_check(const Potential& f, const Potential& g) {
    return {inner(f, g), inner(sym_decr_rearrange(f), sym_decr_rearrange(g))};
}

/// Three-function, two-variable rearrangement inequality:
///   lhs = int int prod_j f_j(a_j1 x1 + a_j2 x2) dx1 dx2, rhs the same with f_j*.
/// Both integrals use the tensor trapezoid rule on the functions' grid with
/// linear interpolation for the arguments.
inline InequalitySides bll_check(const std::array<Potential, 3>& f, const std::array<std::array<double, 2>, 3>& a) {
    for (const auto& fj : f) {
        detail::require_nonnegative(fj.values(), "bll_check");
        if (!(fj.grid() == f[0].grid())) throw DomainError("bll_check: grid mismatch");
    }
    const std::array<Potential, 3> fs{sym_decr_rearrange(f[0]), sym_decr_rearrange(f[1]), sym_decr_rearrange(f[2])};
    const auto& sg = f[0].grid();
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t i = 0; i < sg.size(); ++i) {
        const double x1 = sg.x(i);
        double row_l = 0.0;
        double row_r = 0.0;
        for (std::size_t k = 0; k < sg.size(); ++k) {
            const double x2 = sg.x(k);
            double pl = sg.weight(k);
            double pr = sg.weight(k);
            for (std::size_t j = 0; j < 3; ++j) {
                const double y = a[j][0] * x1 + a[j][1] * x2;
                pl *= f[j].at(y);
                pr *= fs[j].at(y);
            }
            row_l += pl;
            row_r += pr;
        }
        lhs += sg.weight(i) * row_l;
        rhs += sg.weight(i) * row_r;
    }
    return {lhs, rhs};
}

/// (Z(rho; T, 0), Z(rho^s; T, 0)) with rho^s the Steiner symmetrization.
inline InequalitySides steiner_increases_Z(const SpaceTimeDeviation& rho, const SolverConfig& cfg = {}) {
    const auto sym = steiner(rho);
    return {std::exp(log_terminal_value(rho, 0.0, cfg)), std::exp(log_terminal_value(sym, 0.0, cfg))};
}

}  // namespace wnkpz
