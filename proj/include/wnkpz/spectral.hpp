// SPDX-License-Identifier: MIT
//
// Principal eigenvalue F(phi) of 1/2 d^2/dx^2 + phi on [-L, L] with Dirichlet
// walls, discretized as the symmetric tridiagonal matrix
//   H = diag(phi_i - 1/dx^2) + offdiag(1/(2 dx^2)).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "wnkpz/error.hpp"
#include "wnkpz/grid.hpp"
#include "wnkpz/rearrangement.hpp"

namespace wnkpz {

struct GroundState {
    double value;
    Potential eigenfunction;
};

namespace detail {
inline double dirichlet_energy(const Potential& g) {
    const double dx = g.grid().dx();
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const double d = g[i + 1] - g[i];
        e += d * d;
    }
    return e / dx;
}
}  // namespace detail

/// (int phi g^2 - 1/2 int g'^2) / ||g||^2 with g' taken on grid edges.
inline double rayleigh(const Potential& g, const Potential& phi) {
    const double nn = inner(g, g);
    if (!(nn > 0.0)) throw DomainError("rayleigh: g must not vanish");
    double pot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) pot += g.grid().weight(i) * phi[i] * g[i] * g[i];
    return (pot - 0.5 * detail::dirichlet_energy(g)) / nn;
}

inline Potential rho_star(const SpaceGrid& grid) {
    return Potential::sample(grid, [](double x) {
        const double s = 1.0 / std::cosh(x);
        return s * s;
    });
}

inline Potential r_star(const SpaceGrid& grid) {
    const double a = std::cbrt(0.75);
    return Potential::sample(grid, [a](double x) {
        const double s = 1.0 / std::cosh(a * x);
        return a * a * s * s;
    });
}

namespace detail {

/// Number of eigenvalues of H strictly below mu (Sturm count).
inline std::size_t count_below(std::span<const double> diag, double off, double mu) {
    std::size_t count = 0;
    double q = 1.0;
    const double off2 = off * off;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        q = (diag[i] - mu) - (i == 0 ? 0.0 : off2 / q);
        if (q == 0.0) q = -std::numeric_limits<double>::min();
        if (q < 0.0) ++count;
    }
    return count;
}

/// Solves (H - sigma I) y = b for interior nodes, H - sigma I negative definite.
inline void shifted_solve(std::span<const double> diag, double off, double sigma, std::span<double> b,
                          std::vector<double>& cp) {
    const std::size_t m = diag.size();
    cp.resize(m);
    double prev_c = 0.0;
    double prev_y = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double denom = (diag[i] - sigma) - off * prev_c;
        prev_c = off / denom;
        prev_y = (b[i] - off * prev_y) / denom;
        cp[i] = prev_c;
        b[i] = prev_y;
    }
    for (std::size_t i = m - 1; i-- > 0;) b[i] -= cp[i] * b[i + 1];
}

}  // namespace detail

/// Largest eigenpair of the tridiagonal discretization.
///
/// The eigenvalue is bracketed between the Rayleigh quotient of sech/sqrt 2
/// and the Gershgorin bound, located by Sturm bisection, and the eigenvector
/// follows from inverse iteration just above it.
inline GroundState ground_state(const Potential& phi) {
    const auto& sg = phi.grid();
    const std::size_t n = sg.size();
    const std::size_t m = n - 2;
    const double dx = sg.dx();
    const double off = 0.5 / (dx * dx);
    std::vector<double> diag(m);
    for (std::size_t i = 0; i < m; ++i) diag[i] = phi[i + 1] - 1.0 / (dx * dx);

    const auto trial = Potential::sample(sg, [](double x) { return std::sqrt(0.5) / std::cosh(x); });
    double lo = rayleigh(trial, phi);
    double hi = -std::numeric_limits<double>::infinity();
    double glo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        hi = std::max(hi, diag[i] + 2.0 * off);
        glo = std::min(glo, diag[i] - 2.0 * off);
    }
    lo -= 1e-9 * (1.0 + std::abs(lo));
    if (detail::count_below(diag, off, lo) >= m) lo = glo;
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::count_below(diag, off, mid) >= m) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const double value = 0.5 * (lo + hi);

    const double sigma = hi + 1e-10 * (1.0 + std::abs(hi));
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = trial[i + 1];
    std::vector<double> cp;
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
        std::vector<double> w(v);
        detail::shifted_solve(diag, off, sigma, w, cp);
        double nw = 0.0;
        for (double e : w) nw += e * e;
        nw = std::sqrt(nw);
        if (!(nw > 0.0) || !std::isfinite(nw)) throw SolverError("ground_state: inverse iteration failed");
        double sign = 0.0;
        for (double e : w) sign += e;
        const double s = (sign < 0.0 ? -1.0 : 1.0) / nw;
        double change = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double e = w[i] * s;
            change = std::max(change, std::abs(e - v[i]));
            v[i] = e;
        }
        if (it > 0 && change < 1e-14) {
            converged = true;
            break;
        }
    }
    if (!converged) throw SolverError("ground_state: inverse iteration did not converge");

    std::vector<double> g(n, 0.0);
    double nn = 0.0;
    for (std::size_t i = 0; i < m; ++i) nn += v[i] * v[i];
    const double scale = 1.0 / std::sqrt(nn * dx);
    for (std::size_t i = 0; i < m; ++i) g[i + 1] = std::max(0.0, v[i] * scale);
    return {value, Potential(sg, std::move(g))};
}

inline double potbd_bound(const Potential& phi) {
    return 0.5 * std::pow(0.75, 2.0 / 3.0) * std::pow(l2_norm_space(phi), 4.0 / 3.0);
}

/// ||g||_4 / (||g'||^{1/4} ||g||^{3/4}).
inline double gns_ratio(const Potential& g) {
    const double n2 = l2_norm_space(g);
    const double d2 = std::sqrt(detail::dirichlet_energy(g));
    if (!(n2 > 0.0) || !(d2 > 0.0)) throw DomainError("gns_ratio: g must be non-constant and non-zero");
    return lp_norm_space(g, 4.0) / (std::pow(d2, 0.25) * std::pow(n2, 0.75));
}

/// alpha^2 phi(alpha x) on the same grid, cubic Lagrange interpolation, zero outside.
inline Potential rescale(const Potential& phi, double alpha) {
    const auto& sg = phi.grid();
    const auto n = static_cast<long long>(sg.size());
    auto node = [&](long long j) { return (j < 0 || j >= n) ? 0.0 : phi[static_cast<std::size_t>(j)]; };
    return Potential::sample(sg, [&](double x) {
        const double u = (alpha * x + sg.half_width()) / sg.dx();
        if (u < -1.0 || u > static_cast<double>(n)) return 0.0;
        const auto j = static_cast<long long>(std::floor(u));
        const double t = u - static_cast<double>(j);
        const double p0 = node(j - 1), p1 = node(j), p2 = node(j + 1), p3 = node(j + 2);
        const double v = -t * (t - 1.0) * (t - 2.0) / 6.0 * p0 + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * p1 -
                         (t + 1.0) * t * (t - 2.0) / 2.0 * p2 + (t + 1.0) * t * (t - 1.0) / 6.0 * p3;
        return alpha * alpha * v;
    });
}

/// |F(phi + d psi) - F(phi)| / (d ||psi||) for each d.
inline std::vector<double> lipschitz_probe(const Potential& phi, const Potential& psi, const std::vector<double>& deltas) {
    const double f0 = ground_state(phi).value;
    const double npsi = l2_norm_space(psi);
    std::vector<double> out;
    out.reserve(deltas.size());
    for (double d : deltas) {
        if (npsi == 0.0 || d == 0.0) {
            out.push_back(0.0);
            continue;
        }
        const double f1 = ground_state(phi.plus(psi, d)).value;
        out.push_back(std::abs(f1 - f0) / (std::abs(d) * npsi));
    }
    return out;
}

struct StabilityPoint {
    double defect;
    double distance;
};

/// defect = 1 - F(phi)/bound, distance = ||alpha^2 phi(alpha .) - r_star|| with alpha = ||phi||^{-2/3}.
inline StabilityPoint stability_probe(const Potential& phi) {
    detail::require_nonnegative(phi.values(), "stability_probe");
    if (!is_symmetric_decreasing(phi).is_sd) throw DomainError("stability_probe: phi is not symmetric decreasing");
    const double norm = l2_norm_space(phi);
    if (!(norm > 0.0)) throw DomainError("stability_probe: phi must not vanish");
    const double defect = 1.0 - ground_state(phi).value / potbd_bound(phi);
    const double alpha = std::pow(norm, -2.0 / 3.0);
    const auto diff = rescale(phi, alpha).plus(r_star(phi.grid()), -1.0);
    return {defect, l2_norm_space(diff)};
}

}  // namespace wnkpz
