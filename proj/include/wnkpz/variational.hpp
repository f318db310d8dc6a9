// SPDX-License-Identifier: MIT
//
// The scaled rate function
//   Phi(lambda) = lambda^{3/2} inf { (1/2 lambda) ||rho||^2 :
//                                    log Z(rho; 2 lambda, 0) >= lambda - 1/2 log(4 pi lambda) }
// computed by an augmented Lagrangian on the single scalar constraint, with
// projected-gradient inner steps driven by the adjoint gradient of log Z.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "wnkpz/error.hpp"
#include "wnkpz/forward_solver.hpp"
#include "wnkpz/grid.hpp"
#include "wnkpz/random.hpp"
#include "wnkpz/rearrangement.hpp"
#include "wnkpz/spectral.hpp"

namespace wnkpz {

enum class RateInit { rho_star, half_rho_star };

struct RateOptions {
    double half_width = 20.0;
    double dx = 0.05;
    double dt = 0.01;
    SolverConfig solver{};
    std::size_t max_iterations = 3000;
    std::size_t multiplier_interval = 25;
    std::size_t projection_interval = 50;
    double stationarity_tol = 1e-5;
    double feasibility_tol = 1e-6;
    double penalty = 10.0;
    RateInit init = RateInit::rho_star;
    std::vector<double> zetas{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
};

struct IterationRecord {
    std::size_t iteration;
    double cost;
    double residual;
    double stationarity;
    double multiplier;
};

struct RateReport {
    double lambda;
    double phi_hat;
    SpaceTimeDeviation minimizer;
    double constraint_residual;
    std::size_t iterations;
    double upper_certificate;
    double certificate_zeta;
    bool converged;
    std::vector<IterationRecord> trace;
};

/// Result of minimizing ||rho||^2 / (2 c) subject to log Z(rho; T, 0) >= target.
struct DeviationMinimum {
    SpaceTimeDeviation rho;
    double cost;
    double residual;  // log Z - target
    std::size_t iterations;
    bool converged;
    std::vector<IterationRecord> trace;
};

namespace detail {

inline double st_inner(const SpaceTimeDeviation& a, const SpaceTimeDeviation& b) {
    const auto& sg = a.sgrid();
    const std::size_t n = sg.size();
    const auto av = a.values();
    const auto bv = b.values();
    double s = 0.0;
    for (std::size_t j = 0; j < av.size(); ++j) s += sg.weight(j % n) * av[j] * bv[j];
    return s * a.tgrid().dt();
}

inline SpaceTimeDeviation combine(const SpaceTimeDeviation& a, double ca, const SpaceTimeDeviation& b, double cb,
                                  bool project) {
    std::vector<double> v(a.values().size());
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double e = ca * av[j] + cb * bv[j];
        v[j] = project ? std::max(0.0, e) : e;
    }
    return SpaceTimeDeviation(a.tgrid(), a.sgrid(), std::move(v));
}

struct Evaluation {
    double log_value;
    SpaceTimeDeviation grad;  // gradient of log Z
};

inline Evaluation evaluate(const SpaceTimeDeviation& rho, const SolverConfig& cfg) {
    auto r = log_terminal_gradient(rho, 0.0, cfg);
    return {r.log_value, std::move(r.gradient)};
}

/// Smallest-cost rescaling s rho with log Z(s rho) = target (to within 1e-9), s >= 0.
inline SpaceTimeDeviation restore_feasibility(const SpaceTimeDeviation& rho, double target, const SolverConfig& cfg,
                                              double& residual) {
    auto f = [&](double s) { return log_terminal_value(rho.scaled(s), 0.0, cfg) - target; };
    const double f1 = f(1.0);
    if (std::abs(f1) <= 1e-10) {
        residual = f1;
        return rho;
    }
    const double f0 = f(0.0);
    if (f0 >= 0.0) {
        residual = f0;
        return rho.scaled(0.0);
    }
    double lo = 0.0;
    double hi = 1.0;
    double fhi = f1;
    while (fhi < 0.0) {
        lo = hi;
        hi *= 2.0;
        fhi = f(hi);
        if (hi > 1e6) throw SolverError("restore_feasibility: constraint cannot be met by scaling");
    }
    double flo = (lo == 0.0) ? f0 : f(lo);
    // Regula falsi (Illinois) on the monotone map s -> log Z(s rho).
    int side = 0;
    for (int it = 0; it < 100; ++it) {
        const double s = (lo * fhi - hi * flo) / (fhi - flo);
        const double fs = f(s);
        if (fs >= 0.0) {
            hi = s;
            fhi = fs;
            if (side == 1) flo *= 0.5;
            side = 1;
        } else {
            lo = s;
            flo = fs;
            if (side == -1) fhi *= 0.5;
            side = -1;
        }
        if (fs >= 0.0 && fs <= 1e-9) break;
        if (hi - lo <= 1e-15 * hi) break;
    }
    residual = f(hi);
    return rho.scaled(hi);
}

}  // namespace detail

/// Augmented-Lagrangian minimization of ||rho||^2 / (2 cost_scale) subject to
/// log Z(rho; T, 0) >= target, starting from `init`.
inline DeviationMinimum minimize_deviation(const SpaceTimeDeviation& init, double target, double cost_scale,
                                           const RateOptions& opts) {
    if (!(cost_scale > 0.0)) throw ConfigError("minimize_deviation: cost scale must be positive");
    const auto& cfg = opts.solver;
    auto cost_of = [&](const SpaceTimeDeviation& r) { return l2_norm_spacetime_sq(r) / (2.0 * cost_scale); };

    SpaceTimeDeviation rho = detail::combine(init, 1.0, init, 0.0, true);
    auto ev = detail::evaluate(rho, cfg);
    double c = target - ev.log_value;
    double mu = opts.penalty;
    double nu = 0.0;
    {
        const double gg = detail::st_inner(ev.grad, ev.grad);
        if (gg > 0.0) nu = std::max(0.0, detail::st_inner(rho, ev.grad) / (cost_scale * gg));
    }
    auto al_value = [&](double cost, double cval) {
        const double m = std::max(0.0, nu + mu * cval);
        return cost + (m * m - nu * nu) / (2.0 * mu);
    };
    auto al_grad = [&](const SpaceTimeDeviation& r, const detail::Evaluation& e, double cval) {
        const double m = std::max(0.0, nu + mu * cval);
        return detail::combine(r, 1.0 / cost_scale, e.grad, -m, false);
    };

    DeviationMinimum out{rho, cost_of(rho), -c, 0, false, {}};
    double cost = cost_of(rho);
    double lval = al_value(cost, c);
    SpaceTimeDeviation grad = al_grad(rho, ev, c);
    double step = cost_scale;
    std::optional<SpaceTimeDeviation> prev_rho;
    std::optional<SpaceTimeDeviation> prev_grad;
    double best_c_at_update = std::abs(c);
    bool converged = false;
    std::size_t it = 0;
    for (; it < opts.max_iterations; ++it) {
        // Stationarity of the Lagrangian with the current multiplier estimate.
        double nu_hat = std::max(0.0, nu + mu * c);
        if (std::abs(c) <= 1e-4) {
            // active constraint: least-squares multiplier
            const double gg = detail::st_inner(ev.grad, ev.grad);
            if (gg > 0.0) nu_hat = std::max(0.0, detail::st_inner(rho, ev.grad) / (cost_scale * gg));
        }
        const auto lag = detail::combine(rho, 1.0 / cost_scale, ev.grad, -nu_hat, false);
        const auto trial = detail::combine(rho, 1.0, lag, -cost_scale, true);
        const auto diff = detail::combine(rho, 1.0, trial, -1.0, false);
        const double stationarity = std::sqrt(detail::st_inner(diff, diff)) / std::max(1.0, std::sqrt(detail::st_inner(rho, rho)));
        out.trace.push_back({it, cost, -c, stationarity, nu_hat});
        if (stationarity <= opts.stationarity_tol && c <= std::max(opts.feasibility_tol, 1e-4) &&
            (nu_hat == 0.0 || std::abs(c) <= 1e-4)) {
            converged = true;
            break;
        }

        if (prev_rho) {
            const auto s = detail::combine(rho, 1.0, *prev_rho, -1.0, false);
            const auto y = detail::combine(grad, 1.0, *prev_grad, -1.0, false);
            const double sy = detail::st_inner(s, y);
            const double ss = detail::st_inner(s, s);
            step = (sy > 0.0) ? ss / sy : cost_scale;
            step = std::clamp(step, 1e-4 * cost_scale, 1e2 * cost_scale);
        }
        // Projected Armijo backtracking.
        SpaceTimeDeviation cand = rho;
        detail::Evaluation cand_ev{0.0, rho};
        double cand_c = 0.0;
        double cand_cost = 0.0;
        double cand_l = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            cand = detail::combine(rho, 1.0, grad, -step, true);
            const auto d = detail::combine(cand, 1.0, rho, -1.0, false);
            const double dd = detail::st_inner(d, d);
            if (dd == 0.0) break;
            try {
                cand_ev = detail::evaluate(cand, cfg);
            } catch (const SolverError&) {
                step *= 0.5;
                continue;
            }
            cand_c = target - cand_ev.log_value;
            cand_cost = cost_of(cand);
            cand_l = al_value(cand_cost, cand_c);
            if (cand_l <= lval - 1e-4 * dd / step) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No descent possible at this multiplier; move the multiplier instead.
            nu = std::max(0.0, nu + mu * c);
            lval = al_value(cost, c);
            grad = al_grad(rho, ev, c);
            prev_rho.reset();
            prev_grad.reset();
            step = cost_scale;
            continue;
        }
        prev_rho = rho;
        prev_grad = grad;
        rho = std::move(cand);
        ev = std::move(cand_ev);
        c = cand_c;
        cost = cand_cost;

        if ((it + 1) % opts.multiplier_interval == 0) {
            nu = std::max(0.0, nu + mu * c);
            if (c > opts.feasibility_tol && std::abs(c) > 0.25 * best_c_at_update) mu = std::min(mu * 2.0, 1e6);
            best_c_at_update = std::min(best_c_at_update, std::abs(c));
            prev_rho.reset();
            prev_grad.reset();
        }
        if (opts.projection_interval > 0 && (it + 1) % opts.projection_interval == 0) {
            auto sym = steiner(rho);
            if (!(sym.values().size() == rho.values().size())) throw SolverError("projection failed");
            rho = std::move(sym);
            ev = detail::evaluate(rho, cfg);
            c = target - ev.log_value;
            cost = cost_of(rho);
            prev_rho.reset();
            prev_grad.reset();
        }
        lval = al_value(cost, c);
        grad = al_grad(rho, ev, c);
    }
    double residual = 0.0;
    rho = detail::restore_feasibility(rho, target, cfg, residual);
    out.rho = rho;
    out.cost = cost_of(rho);
    out.residual = residual;
    out.iterations = it;
    out.converged = converged && residual >= -opts.feasibility_tol;
    return out;
}

inline double tail_target(double lambda) {
    return lambda - 0.5 * std::log(4.0 * std::numbers::pi * lambda);
}

namespace detail {
inline TimeGrid rate_time_grid(double lambda, const RateOptions& opts) {
    return TimeGrid::with_step(0.0, 2.0 * lambda, opts.dt);
}
inline SpaceGrid rate_space_grid(const RateOptions& opts) {
    return SpaceGrid::with_spacing(opts.half_width, opts.dx);
}
}  // namespace detail

/// (4/3)(1+zeta)^2 lambda^{3/2} after checking that (1+zeta) rho_star is feasible.
inline double upper_certificate(double lambda, double zeta, const RateOptions& opts = {}) {
    if (!(zeta > 0.0)) throw DomainError("upper_certificate: zeta must be positive");
    if (!(lambda > 0.0)) throw DomainError("upper_certificate: lambda must be positive");
    const auto tg = detail::rate_time_grid(lambda, opts);
    const auto sg = detail::rate_space_grid(opts);
    const auto rho = SpaceTimeDeviation::constant_in_time(tg, rho_star(sg).scaled(1.0 + zeta));
    const double lz = log_terminal_value(rho, 0.0, opts.solver);
    if (lz < tail_target(lambda)) {
        throw CertificateUnavailable("upper_certificate: (1+zeta) rho_star infeasible at lambda = " +
                                     std::to_string(lambda) + ", zeta = " + std::to_string(zeta));
    }
    return 4.0 / 3.0 * (1.0 + zeta) * (1.0 + zeta) * std::pow(lambda, 1.5);
}

inline RateReport rate_phi(double lambda, const RateOptions& opts = {}) {
    if (!(lambda >= 1.0 && lambda <= 32.0)) throw DomainError("rate_phi: lambda must lie in [1, 32]");
    const auto tg = detail::rate_time_grid(lambda, opts);
    const auto sg = detail::rate_space_grid(opts);
    const double scale = opts.init == RateInit::rho_star ? 1.0 : 0.5;
    const auto init = SpaceTimeDeviation::constant_in_time(tg, rho_star(sg).scaled(scale));
    auto m = minimize_deviation(init, tail_target(lambda), lambda, opts);

    double cert = std::numeric_limits<double>::infinity();
    double cert_zeta = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> zetas = opts.zetas;
    std::sort(zetas.begin(), zetas.end());
    for (double z : zetas) {
        try {
            cert = upper_certificate(lambda, z, opts);
            cert_zeta = z;
            break;
        } catch (const CertificateUnavailable&) {
        }
    }
    return {lambda,
            std::pow(lambda, 1.5) * m.cost,
            std::move(m.rho),
            m.residual,
            m.iterations,
            cert,
            cert_zeta,
            m.converged,
            std::move(m.trace)};
}

/// (1/2 lambda) ||rho_hat - rho_star||^2 over [0, 2 lambda].
inline double minimizer_distance(const RateReport& report) {
    const auto& m = report.minimizer;
    const auto ref = SpaceTimeDeviation::constant_in_time(m.tgrid(), rho_star(m.sgrid()));
    return l2_norm_spacetime_sq(m.minus(ref)) / (2.0 * report.lambda);
}

struct EquicontinuityPoint {
    double lhs;
    double modulus;
};

/// h_lambda(rho; t, x) = lambda^{-1} log(lambda^{1/2} Z(rho; lambda t, lambda x)).
inline double h_lambda(const SpaceTimeDeviation& rho, double lambda, double t, double x, const SolverConfig& cfg = {}) {
    const std::size_t kt = rho.tgrid().index_of(lambda * t);
    const std::size_t ix = rho.sgrid().nearest(lambda * x);
    double logz = 0.0;
    solve_delta_observed(rho, cfg, [&](std::size_t k, std::span<const double> z, double ls) {
        if (k == kt) logz = std::log(z[ix]) + ls;
    });
    return (0.5 * std::log(lambda) + logz) / lambda;
}

/// |h_lambda(rho1) - h_lambda(rho2)| at (t, x) and the modulus
/// lambda^{-1/2} ||rho1 - rho2|| (1 + ||rho1||^2 / lambda + ||rho2||^2 / lambda).
inline EquicontinuityPoint equicontinuity_probe(const SpaceTimeDeviation& rho1, const SpaceTimeDeviation& rho2,
                                                double lambda, double t, double x, const SolverConfig& cfg = {}) {
    detail::require_nonnegative(rho1.values(), "equicontinuity_probe");
    detail::require_nonnegative(rho2.values(), "equicontinuity_probe");
    const double d = l2_norm_spacetime(rho1.minus(rho2));
    if (!(d / std::sqrt(lambda) < 1.0)) throw DomainError("equicontinuity_probe: rho1 and rho2 too far apart");
    const double lhs = std::abs(h_lambda(rho1, lambda, t, x, cfg) - h_lambda(rho2, lambda, t, x, cfg));
    const double modulus = d / std::sqrt(lambda) *
                           (1.0 + l2_norm_spacetime_sq(rho1) / lambda + l2_norm_spacetime_sq(rho2) / lambda);
    return {lhs, modulus};
}

}  // namespace wnkpz
