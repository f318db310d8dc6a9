// SPDX-License-Identifier: MIT
//
// Brownian-bridge Monte Carlo for  E_{a->b}[exp(int_0^T phi(B(s)) ds)],
// first-passage times of bridges, the Laplace asymptotics of their moment
// generating function, and the deterministic limit shape h_*.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "wnkpz/error.hpp"
#include "wnkpz/forward_solver.hpp"
#include "wnkpz/grid.hpp"
#include "wnkpz/random.hpp"
#include "wnkpz/spectral.hpp"

namespace wnkpz {

struct BridgeConfig {
    std::size_t n_paths = 100000;
    std::size_t n_time_steps = 100;
    std::uint64_t seed = 20240607;

    void validate() const {
        if (n_paths < 1) throw ConfigError("BridgeConfig: n_paths must be >= 1");
        if (n_time_steps < 2) throw ConfigError("BridgeConfig: n_time_steps must be >= 2");
    }

    /// 20 steps per unit time, at least 2.
    static BridgeConfig for_duration(std::size_t n_paths, double duration, std::uint64_t seed) {
        const auto steps = static_cast<std::size_t>(std::ceil(20.0 * duration));
        return {n_paths, std::max<std::size_t>(steps, 2), seed};
    }
};

/// Bridge from `from` at time 0 to `to` at `duration`, sampled on n_time_steps
/// equal steps by successive conditional Gaussians; path_index selects the stream.
inline std::vector<double> sample_bridge(double from, double to, double duration, const BridgeConfig& cfg,
                                         std::uint64_t path_index = 0) {
    if (!(duration > 0.0)) throw DomainError("sample_bridge: duration must be positive");
    cfg.validate();
    const std::size_t n = cfg.n_time_steps;
    const double h = duration / static_cast<double>(n);
    RandomStream rng(cfg.seed, path_index);
    std::vector<double> path(n + 1);
    path[0] = from;
    double b = from;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double remaining = duration - static_cast<double>(k) * h;
        const double frac = h / remaining;
        b += (to - b) * frac + std::sqrt(h * (1.0 - frac)) * rng.normal();
        path[k + 1] = b;
    }
    path[n] = to;
    return path;
}

struct FkEstimate {
    double mean;       // E[exp(int phi)] p(duration, to - from)
    double std_error;  // standard error of mean
    double log_mean;   // log of mean, finite even when mean under/overflows
    double log_expectation;  // log E[exp(int phi)] without the kernel factor
    double ess;        // effective sample size (sum w)^2 / sum w^2
};

namespace detail {

/// Streaming log-sum-exp of w = exp(I) and w^2, in path order.
class LogMoments {
public:
    void add(double log_w) {
        if (log_w > max_) {
            const double r = std::exp(max_ - log_w);
            s1_ *= r;
            s2_ *= r * r;
            max_ = log_w;
        }
        const double e = std::exp(log_w - max_);
        s1_ += e;
        s2_ += e * e;
        ++n_;
    }
    [[nodiscard]] double log_mean() const { return max_ + std::log(s1_ / static_cast<double>(n_)); }
    /// Standard error of the mean of w divided by the mean of w.
    [[nodiscard]] double relative_std_error() const {
        if (n_ < 2) return 0.0;
        const double nn = static_cast<double>(n_);
        const double m1 = s1_ / nn;
        const double m2 = s2_ / nn;
        const double var = std::max(0.0, m2 - m1 * m1) * nn / (nn - 1.0);
        return std::sqrt(var / nn) / m1;
    }
    [[nodiscard]] double ess() const { return s1_ * s1_ / s2_; }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double s1_ = 0.0;
    double s2_ = 0.0;
    std::size_t n_ = 0;
};

template <class Phi>
LogMoments bridge_log_moments(Phi&& phi, double duration, double from, double to, const BridgeConfig& cfg) {
    cfg.validate();
    if (!(duration > 0.0)) throw DomainError("fk_estimate: duration must be positive");
    const std::size_t n = cfg.n_time_steps;
    const double h = duration / static_cast<double>(n);
    LogMoments acc;
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
        RandomStream rng(cfg.seed, p);
        double b = from;
        double integral = 0.5 * phi(from);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double frac = h / (duration - static_cast<double>(k) * h);
            b += (to - b) * frac + std::sqrt(h * (1.0 - frac)) * rng.normal();
            integral += phi(b);
        }
        integral += 0.5 * phi(to);
        acc.add(integral * h);
    }
    return acc;
}

}  // namespace detail

/// Monte Carlo Feynman-Kac estimate of Z(phi; duration, to) started from `from`,
/// trapezoid rule along each path.
inline FkEstimate fk_estimate(const Potential& phi, double duration, double from, double to, const BridgeConfig& cfg) {
    const auto m = detail::bridge_log_moments([&](double y) { return phi.at(y); }, duration, from, to, cfg);
    const double log_p = std::log(heat_kernel(duration, to - from));
    const double le = m.log_mean();
    const double mean = std::exp(le + log_p);
    return {mean, mean * m.relative_std_error(), le + log_p, le, m.ess()};
}

/// lambda^{-1} log E_{x->0}[exp(int_0^lambda phi(B(s)) ds)], accumulated in log space.
inline double growth_rate(const Potential& phi, double lambda, double x, const BridgeConfig& cfg) {
    if (!(lambda > 0.0)) throw DomainError("growth_rate: lambda must be positive");
    const auto m = detail::bridge_log_moments([&](double y) { return phi.at(y); }, lambda, x, 0.0, cfg);
    return m.log_mean() / lambda;
}

// ---------------------------------------------------------------------------
// First passage of a bridge to 0

/// Density of the first time a bridge from lambda x (time 0) to 0 (time lambda t) hits 0.
inline double hitting_density(double s, double t, double x, double lambda) {
    const double T = lambda * t;
    if (!(s > 0.0) || !(s < T)) return 0.0;
    const double a = lambda * x;
    if (a == 0.0) return 0.0;
    const double log_pref = 0.5 * std::log(lambda * lambda * lambda * t * x * x) -
                            0.5 * (std::log(2.0 * std::numbers::pi * (T - s)) + 3.0 * std::log(s));
    return std::exp(log_pref - (T - s) * a * a / (2.0 * T * s));
}

/// First hitting times of 0 for bridges from `from` to 0 over `duration`.
/// Between grid points a crossing is detected with the bridge crossing
/// probability exp(-2 a b / h) and the hit time is drawn uniformly in the step.
inline std::vector<double> sample_hitting_times(double from, double duration, const BridgeConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.n_time_steps;
    const double h = duration / static_cast<double>(n);
    const double start = std::abs(from);
    std::vector<double> out;
    out.reserve(cfg.n_paths);
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
        RandomStream rng(cfg.seed, p);
        double b = start;
        double hit = duration;
        for (std::size_t k = 0; k < n; ++k) {
            double next = 0.0;
            if (k + 1 < n) {
                const double frac = h / (duration - static_cast<double>(k) * h);
                next = b + (0.0 - b) * frac + std::sqrt(h * (1.0 - frac)) * rng.normal();
            }
            const double u = rng.uniform();
            bool crossed = next <= 0.0;
            if (!crossed) crossed = rng.uniform() < std::exp(-2.0 * b * next / h);
            if (crossed) {
                hit = (static_cast<double>(k) + u) * h;
                break;
            }
            b = next;
        }
        out.push_back(hit);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Laplace asymptotics

inline double laplace_v(double beta, double s, double t, double x) {
    if (!(s > 0.0) || s > 1.0) throw DomainError("laplace_v: s must lie in (0, 1]");
    if (!(t > 0.0) || !(beta > 0.0)) throw DomainError("laplace_v: need t > 0 and beta > 0");
    return -beta * t * s - (1.0 - s) * x * x / (2.0 * s * t);
}

inline double laplace_v_second_derivative(double beta, double s, double t, double x) {
    (void)beta;
    if (!(s > 0.0)) throw DomainError("laplace_v_second_derivative: s must be positive");
    return -x * x / (t * s * s * s);
}

inline double laplace_argmax(double beta, double t, double x) {
    return std::min(std::abs(x) / (std::sqrt(2.0 * beta) * t), 1.0);
}

/// Limit of lambda^{-1} log E[exp(-beta T(lambda t, lambda x))]: V_beta at its maximizer.
inline double laplace_logmgf(double beta, double t, double x) {
    if (!(t > 0.0) || !(beta > 0.0)) throw DomainError("laplace_logmgf: need t > 0 and beta > 0");
    const double ax = std::abs(x);
    const double s = laplace_argmax(beta, t, ax);
    if (s == 1.0) return -beta * t;
    return laplace_v(beta, s, t, ax);
}

/// lambda^{-1} log of the exact finite-lambda integral
///   int_0^1 sqrt(lambda x^2) / sqrt(2 pi t s^3 (1-s)) exp(lambda V_beta(s,t,x)) ds.
inline double laplace_integral(double beta, double lambda, double t, double x) {
    const double ax = std::abs(x);
    if (!(ax > 0.0)) throw DomainError("laplace_integral: x must be non-zero");
    const double s_star = laplace_argmax(beta, t, ax);
    const double v_star = laplace_v(beta, s_star, t, ax);
    auto integrand = [&](double s) {
        if (!(s > 0.0) || !(s < 1.0)) return 0.0;
        const double log_pref = 0.5 * std::log(lambda * ax * ax) -
                                0.5 * (std::log(2.0 * std::numbers::pi * t * (1.0 - s)) + 3.0 * std::log(s));
        const double e = log_pref + lambda * (laplace_v(beta, s, t, ax) - v_star);
        return std::isfinite(e) ? std::exp(e) : 0.0;
    };
    boost::math::quadrature::tanh_sinh<double> q;
    double total = 0.0;
    if (s_star < 1.0) {
        total = q.integrate(integrand, 0.0, s_star) + q.integrate(integrand, s_star, 1.0);
    } else {
        total = q.integrate(integrand, 0.0, 1.0);
    }
    return v_star + std::log(total) / lambda;
}

/// -|x| + t/2 for |x| <= t, else -x^2 / (2t).
inline double h_star(double t, double x) {
    if (!(t > 0.0)) throw DomainError("h_star: t must be positive");
    const double ax = std::abs(x);
    return ax <= t ? -ax + 0.5 * t : -x * x / (2.0 * t);
}

// ---------------------------------------------------------------------------
// Limit shape

enum class ShapeBackend { pde, mc };

struct ShapeOptions {
    double step = 0.05;            // spacing of the (t, x) evaluation grid
    double dx = 0.05;              // PDE space step
    double dt = 0.01;              // PDE time step (upper bound)
    double half_width = 0.0;       // 0 selects lambda/delta + 10 sqrt(2 lambda)
    SolverConfig solver{};
    std::size_t mc_paths = 2000;
    std::uint64_t seed = 20240607;
};

struct ShapeProfile {
    double lambda;
    double delta;
    std::vector<double> ts;
    std::vector<double> xs;
    std::vector<double> values;      // h_lambda, row-major in (t, x)
    std::vector<double> std_errors;  // mc backend only, same layout
    double sup_error;

    [[nodiscard]] double at(std::size_t it, std::size_t ix) const { return values[it * xs.size() + ix]; }
};

/// h_lambda(rho_star; t, x) = lambda^{-1} log(lambda^{1/2} Z(rho_star; lambda t, lambda x))
/// on t = 2, 2 - step, ... >= delta and x = 0, +-step, ... within +-1/delta.
inline ShapeProfile shape_profile(double lambda, double delta, ShapeBackend backend, const ShapeOptions& opts = {}) {
    if (!(lambda >= 4.0)) throw DomainError("shape_profile: lambda must be >= 4");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("shape_profile: delta must lie in (0, 1)");
    ShapeProfile prof{lambda, delta, {}, {}, {}, {}, 0.0};
    for (std::size_t k = 0;; ++k) {
        const double t = 2.0 - static_cast<double>(k) * opts.step;
        if (t < delta - 1e-12) break;
        prof.ts.push_back(t);
    }
    std::reverse(prof.ts.begin(), prof.ts.end());
    const auto nx_half = static_cast<std::size_t>(std::floor(1.0 / delta / opts.step + 1e-9));
    for (std::size_t j = 0; j <= 2 * nx_half; ++j) {
        prof.xs.push_back((static_cast<double>(j) - static_cast<double>(nx_half)) * opts.step);
    }
    const std::size_t nt = prof.ts.size();
    const std::size_t nx = prof.xs.size();
    prof.values.assign(nt * nx, 0.0);

    if (backend == ShapeBackend::pde) {
        const double required = lambda / delta + 10.0 * std::sqrt(2.0 * lambda);
        const double half_width = opts.half_width > 0.0 ? opts.half_width : required;
        if (half_width < required) {
            throw ConfigError("shape_profile: half width " + std::to_string(half_width) + " below lambda/delta + 10 sqrt(2 lambda) = " +
                              std::to_string(required));
        }
        const auto sg = SpaceGrid::with_spacing(half_width, opts.dx);
        // Time step dividing lambda * step, so every lambda t_k is a grid time.
        const double macro = lambda * opts.step;
        const auto m = static_cast<std::size_t>(std::ceil(macro / opts.dt - 1e-9));
        const std::size_t n_steps = static_cast<std::size_t>(std::llround(2.0 / opts.step)) * m;
        const TimeGrid tg(0.0, 2.0 * lambda, n_steps);
        const auto phi = rho_star(sg);
        std::vector<std::size_t> row_of(n_steps + 1, nt);
        for (std::size_t it = 0; it < nt; ++it) {
            const auto back = static_cast<std::size_t>(std::llround((2.0 - prof.ts[it]) / opts.step));
            row_of[n_steps - back * m] = it;
        }
        solve_delta_observed(phi, tg, opts.solver, [&](std::size_t k, std::span<const double> z, double ls) {
            const std::size_t it = row_of[k];
            if (it == nt) return;
            for (std::size_t j = 0; j < nx; ++j) {
                const double u = (lambda * prof.xs[j] + sg.half_width()) / sg.dx();
                const auto i = std::min(static_cast<std::size_t>(u), sg.size() - 2);
                const double f = u - static_cast<double>(i);
                const double lz = (1.0 - f) * std::log(z[i]) + (f > 0.0 ? f * std::log(z[i + 1]) : 0.0) + ls;
                prof.values[it * nx + j] = (0.5 * std::log(lambda) + lz) / lambda;
            }
        });
    } else {
        prof.std_errors.assign(nt * nx, 0.0);
        auto sech2 = [](double y) {
            const double s = 1.0 / std::cosh(y);
            return s * s;
        };
        for (std::size_t it = 0; it < nt; ++it) {
            const double t = prof.ts[it];
            for (std::size_t j = 0; j < nx; ++j) {
                const double x = prof.xs[j];
                auto cfg = BridgeConfig::for_duration(opts.mc_paths, lambda * t, opts.seed);
                const auto mom = detail::bridge_log_moments(sech2, lambda * t, lambda * x, 0.0, cfg);
                prof.values[it * nx + j] =
                    mom.log_mean() / lambda - x * x / (2.0 * t) - 0.5 * std::log(2.0 * std::numbers::pi * t) / lambda;
                prof.std_errors[it * nx + j] = mom.relative_std_error() / lambda;
            }
        }
    }
    double sup = 0.0;
    for (std::size_t it = 0; it < nt; ++it) {
        for (std::size_t j = 0; j < nx; ++j) {
            sup = std::max(sup, std::abs(prof.values[it * nx + j] - h_star(prof.ts[it], prof.xs[j])));
        }
    }
    prof.sup_error = sup;
    return prof;
}

}  // namespace wnkpz
