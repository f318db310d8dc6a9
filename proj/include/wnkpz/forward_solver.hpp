// SPDX-License-Identifier: MIT
//
// Solvers for  dZ/dt = 1/2 Z_xx + rho(t,x) Z  on [-L, L] with Dirichlet walls.
//
// Time stepping is a theta scheme. solve_delta starts from the heat kernel at
// t0 and smooths both ends of the run with backward-Euler substeps; propagate
// uses plain Crank-Nicolson so that it composes exactly. The adjoint replays
// the same substeps in reverse (each step matrix is symmetric), which makes
// the gradient below the exact derivative of the discrete map.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wnkpz/error.hpp"
#include "wnkpz/grid.hpp"
#include "wnkpz/random.hpp"

namespace wnkpz {

enum class Scheme { crank_nicolson, chaos_series };

struct SolverConfig {
    Scheme scheme = Scheme::crank_nicolson;
    double delta_warmup = 1e-3;
    std::size_t chaos_order = 6;
    double tolerance = 1e-8;
    std::size_t rannacher_substeps = 4;

    void validate() const {
        if (!(delta_warmup > 0.0)) throw ConfigError("SolverConfig: delta_warmup must be positive");
        if (chaos_order < 1) throw ConfigError("SolverConfig: chaos_order must be >= 1");
        if (!(tolerance > 0.0)) throw ConfigError("SolverConfig: tolerance must be positive");
        if (rannacher_substeps < 1) throw ConfigError("SolverConfig: rannacher_substeps must be >= 1");
    }
};

namespace detail {

struct Substep {
    std::size_t row;
    double h;
    double theta;
};

/// Substeps of solve_delta. Cell 0 runs from t0 to t1; cell boundaries are
/// reached after every `ends[k]` substeps.
struct Plan {
    std::vector<Substep> steps;
    std::vector<std::size_t> ends;  // ends[k] = substep count at which time t_{k+1} is reached
};

inline Plan delta_plan(const TimeGrid& tg, const SolverConfig& cfg) {
    cfg.validate();
    const double dt = tg.dt();
    if (!(cfg.delta_warmup < dt)) {
        throw ConfigError("solve_delta: delta_warmup must be smaller than the time step");
    }
    if (tg.t_start() != 0.0) throw ConfigError("solve_delta: time grid must start at 0");
    const std::size_t n = tg.n_steps();
    const std::size_t m = cfg.rannacher_substeps;
    Plan p;
    p.steps.reserve(n + 2 * m);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0) {
            const double h = (dt - cfg.delta_warmup) / static_cast<double>(m);
            for (std::size_t j = 0; j < m; ++j) p.steps.push_back({0, h, 1.0});
        } else if (k + 1 == n) {
            for (std::size_t j = 0; j < m; ++j) p.steps.push_back({k, dt / static_cast<double>(m), 1.0});
        } else {
            p.steps.push_back({k, dt, 0.5});
        }
        p.ends.push_back(p.steps.size());
    }
    return p;
}

/// Normalized heat kernel at t0 tilted by exp(t0 rho(0,x)); walls zero.
inline std::vector<double> warmup_state(const SpaceGrid& sg, std::span<const double> rho0, double t0) {
    const std::size_t n = sg.size();
    std::vector<double> z(n, 0.0);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += sg.weight(i) * heat_kernel(t0, sg.x(i));
    for (std::size_t i = 1; i + 1 < n; ++i) z[i] = heat_kernel(t0, sg.x(i)) * std::exp(t0 * rho0[i]) / mass;
    return z;
}

/// One theta step  (I - theta h H) z' = (I + (1-theta) h H) z  with H = 1/2 D2 + diag(rho).
class StepKernel {
public:
    explicit StepKernel(std::size_t n) : rhs_(n), cp_(n) {}

    void apply(std::span<double> z, std::span<const double> rho, double h, double theta, double dx) {
        const std::size_t n = z.size();
        const double r = h / (dx * dx);
        const double ex = 1.0 - theta;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            rhs_[i] = z[i] * (1.0 - ex * r + ex * h * rho[i]) + 0.5 * ex * r * (z[i - 1] + z[i + 1]);
        }
        const double e = -0.5 * theta * r;
        double prev_c = 0.0;
        double prev_y = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double d = 1.0 + theta * r - theta * h * rho[i];
            const double denom = d - e * prev_c;
            if (!(denom > 0.0)) throw SolverError("theta step: implicit matrix lost positivity");
            prev_c = e / denom;
            prev_y = (rhs_[i] - e * prev_y) / denom;
            cp_[i] = prev_c;
            z[i] = prev_y;
        }
        for (std::size_t i = n - 2; i >= 2; --i) z[i - 1] -= cp_[i - 1] * z[i];
        z[0] = 0.0;
        z[n - 1] = 0.0;
    }

private:
    std::vector<double> rhs_;
    std::vector<double> cp_;
};

/// Divides z by its largest magnitude and returns the log of that factor.
inline double renormalize(std::span<double> z) {
    double m = 0.0;
    for (double v : z) m = std::max(m, std::abs(v));
    if (!(m > 0.0) || !std::isfinite(m)) return 0.0;
    const double inv = 1.0 / m;
    for (auto& v : z) v *= inv;
    return std::log(m);
}

inline void check_state(std::span<const double> z, std::size_t step, bool require_nonnegative) {
    for (double v : z) {
        if (!std::isfinite(v)) {
            throw SolverError("forward solve: non-finite value at step " + std::to_string(step));
        }
        if (require_nonnegative && v < 0.0) {
            throw SolverError("forward solve: negative value at step " + std::to_string(step));
        }
    }
}

/// Relative level below which a normalized forward state is treated as
/// underflow noise and lifted to the floor.
inline constexpr double kUnderflowFloor = 1e-250;

/// For a state normalized to max 1: rejects non-finite values and negatives
/// above the underflow level, then lifts interior values to the floor.
inline void floor_state(std::span<double> z, std::size_t step) {
    const std::size_t n = z.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double v = z[i];
        if (!std::isfinite(v)) {
            throw SolverError("forward solve: non-finite value at step " + std::to_string(step));
        }
        if (v < -1e-200) throw SolverError("forward solve: negative value at step " + std::to_string(step));
        if (v < kUnderflowFloor) z[i] = kUnderflowFloor;
    }
}

/// Runs solve_delta with rows supplied by `row(k)` and reports every cell
/// boundary as obs(k, normalized_state, log_scale).
template <class RowFn, class Obs>
void delta_sweep(const TimeGrid& tg, const SpaceGrid& sg, RowFn&& row, const SolverConfig& cfg, Obs&& obs) {
    const Plan plan = delta_plan(tg, cfg);
    std::vector<double> z = warmup_state(sg, row(0), cfg.delta_warmup);
    double log_scale = renormalize(z);
    floor_state(z, 0);
    obs(std::size_t{0}, std::span<const double>(z), log_scale);
    StepKernel kernel(sg.size());
    std::size_t cell = 0;
    for (std::size_t j = 0; j < plan.steps.size(); ++j) {
        const auto& s = plan.steps[j];
        kernel.apply(z, row(s.row), s.h, s.theta, sg.dx());
        log_scale += renormalize(z);
        floor_state(z, j + 1);
        if (j + 1 == plan.ends[cell]) {
            ++cell;
            obs(cell, std::span<const double>(z), log_scale);
        }
    }
}

}  // namespace detail

/// Cell-boundary observer form of solve_delta for a time-independent potential.
template <class Obs>
void solve_delta_observed(const Potential& phi, const TimeGrid& tg, const SolverConfig& cfg, Obs&& obs) {
    auto row = [&](std::size_t) { return phi.values(); };
    detail::delta_sweep(tg, phi.grid(), row, cfg, obs);
}

template <class Obs>
void solve_delta_observed(const SpaceTimeDeviation& rho, const SolverConfig& cfg, Obs&& obs) {
    auto row = [&](std::size_t k) { return rho.row(k); };
    detail::delta_sweep(rho.tgrid(), rho.sgrid(), row, cfg, obs);
}

/// log Z(rho; T, x_c) at the grid node nearest to x.
inline double log_terminal_value(const SpaceTimeDeviation& rho, double x, const SolverConfig& cfg = {}) {
    const std::size_t ic = rho.sgrid().nearest(x);
    const std::size_t last = rho.rows();
    double out = -std::numeric_limits<double>::infinity();
    solve_delta_observed(rho, cfg, [&](std::size_t k, std::span<const double> z, double ls) {
        if (k == last) out = std::log(z[ic]) + ls;
    });
    return out;
}

inline Field chaos_field(const SpaceTimeDeviation& rho, const SolverConfig& cfg);

/// Z(rho; t, x) on every node of rho's grids. Row 0 holds the warm-up state at t0.
inline Field solve_delta(const SpaceTimeDeviation& rho, const SolverConfig& cfg = {}) {
    if (cfg.scheme == Scheme::chaos_series) return chaos_field(rho, cfg);
    const std::size_t n = rho.sgrid().size();
    std::vector<double> values((rho.rows() + 1) * n);
    solve_delta_observed(rho, cfg, [&](std::size_t k, std::span<const double> z, double ls) {
        const double s = std::exp(ls);
        for (std::size_t i = 0; i < n; ++i) values[k * n + i] = z[i] * s;
    });
    detail::check_state(values, rho.rows(), true);
    return Field(rho.tgrid(), rho.sgrid(), std::move(values));
}

/// Crank-Nicolson evolution of f from grid time s to grid time t.
inline Potential propagate(const SpaceTimeDeviation& rho, double s, double t, const Potential& f) {
    if (!(s < t)) throw DomainError("propagate: need s < t");
    if (!(f.grid() == rho.sgrid())) throw DomainError("propagate: grid mismatch");
    const std::size_t k0 = rho.tgrid().index_of(s);
    const std::size_t k1 = rho.tgrid().index_of(t);
    std::vector<double> z(f.values().begin(), f.values().end());
    z.front() = 0.0;
    z.back() = 0.0;
    detail::StepKernel kernel(z.size());
    for (std::size_t k = k0; k < k1; ++k) {
        kernel.apply(z, rho.row(k), rho.tgrid().dt(), 0.5, rho.sgrid().dx());
        detail::check_state(z, k - k0 + 1, false);
    }
    return Potential(rho.sgrid(), std::move(z));
}

/// Adjoint field A(s, .) = P(rho; s -> T)^* terminal on the solve_delta substep
/// plan, one row per cell boundary (row 0 at t0).
inline Field adjoint_solve(const SpaceTimeDeviation& rho, const Potential& terminal, const SolverConfig& cfg = {}) {
    if (!(terminal.grid() == rho.sgrid())) throw DomainError("adjoint_solve: grid mismatch");
    const auto plan = detail::delta_plan(rho.tgrid(), cfg);
    const std::size_t n = rho.sgrid().size();
    const std::size_t rows = rho.rows() + 1;
    std::vector<double> values(rows * n);
    std::vector<double> a(terminal.values().begin(), terminal.values().end());
    a.front() = 0.0;
    a.back() = 0.0;
    std::copy(a.begin(), a.end(), values.begin() + static_cast<std::ptrdiff_t>((rows - 1) * n));
    detail::StepKernel kernel(n);
    std::size_t cell = rho.rows();
    for (std::size_t j = plan.steps.size(); j-- > 0;) {
        const auto& s = plan.steps[j];
        kernel.apply(a, rho.row(s.row), s.h, s.theta, rho.sgrid().dx());
        detail::check_state(a, plan.steps.size() - j, false);
        const std::size_t boundary = (cell >= 2) ? plan.ends[cell - 2] : 0;
        if (j == boundary) {
            --cell;
            std::copy(a.begin(), a.end(), values.begin() + static_cast<std::ptrdiff_t>(cell * n));
        }
    }
    return Field(rho.tgrid(), rho.sgrid(), std::move(values));
}

/// log Z(rho; T, x_c) and its gradient with respect to rho as a density on
/// the space-time grid (discrete derivative divided by dt dx).
struct LogValueGradient {
    double log_value;
    SpaceTimeDeviation gradient;
};

inline LogValueGradient log_terminal_gradient(const SpaceTimeDeviation& rho, double x = 0.0,
                                              const SolverConfig& cfg = {}) {
    const auto& sg = rho.sgrid();
    const auto plan = detail::delta_plan(rho.tgrid(), cfg);
    const std::size_t n = sg.size();
    const std::size_t ns = plan.steps.size();
    const std::size_t ic = sg.nearest(x);
    const double t0 = cfg.delta_warmup;

    // Forward pass: every substep state, normalized, with its log scale.
    std::vector<double> z((ns + 1) * n);
    std::vector<double> zlog(ns + 1);
    {
        auto z0 = detail::warmup_state(sg, rho.row(0), t0);
        zlog[0] = detail::renormalize(z0);
        detail::floor_state(z0, 0);
        std::copy(z0.begin(), z0.end(), z.begin());
    }
    detail::StepKernel kernel(n);
    for (std::size_t j = 0; j < ns; ++j) {
        std::span<double> cur(z.data() + (j + 1) * n, n);
        std::copy(z.begin() + static_cast<std::ptrdiff_t>(j * n), z.begin() + static_cast<std::ptrdiff_t>((j + 1) * n),
                  cur.begin());
        const auto& s = plan.steps[j];
        kernel.apply(cur, rho.row(s.row), s.h, s.theta, sg.dx());
        zlog[j + 1] = zlog[j] + detail::renormalize(cur);
        detail::floor_state(cur, j + 1);
    }
    const double zc = z[ns * n + ic];
    if (!(zc > 0.0)) throw SolverError("log_terminal_gradient: terminal value is not positive");
    const double log_value = std::log(zc) + zlog[ns];

    // Adjoint pass, accumulating the exact derivative of the discrete map.
    std::vector<double> grad(rho.values().size(), 0.0);
    std::vector<double> a(n, 0.0);
    std::vector<double> a_next(n);
    a[ic] = 1.0;
    double alog = 0.0;
    for (std::size_t j = ns; j-- > 0;) {
        const auto& s = plan.steps[j];
        std::copy(a.begin(), a.end(), a_next.begin());
        kernel.apply(a, rho.row(s.row), s.h, s.theta, sg.dx());
        detail::check_state(a, ns - j, false);
        const double anext_log = alog;
        alog += detail::renormalize(a);
        // d log Zc / d rho_{row,i} += h [(1-th) A^{j+1} + th A^j]_i [(1-th) Z^j + th Z^{j+1}]_i / Zc
        const double th = s.theta;
        const double* zj = z.data() + j * n;
        const double* zj1 = z.data() + (j + 1) * n;
        const double c = std::exp(anext_log + zlog[j] - log_value);
        const double wa_next = (1.0 - th) * c;
        const double wa_cur = th * c * std::exp(alog - anext_log);
        const double wz_j1 = th * std::exp(zlog[j + 1] - zlog[j]);
        double* g = grad.data() + s.row * n;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double bz = (1.0 - th) * zj[i] + wz_j1 * zj1[i];
            const double ba = wa_next * a_next[i] + wa_cur * a[i];
            g[i] += s.h * ba * bz;
        }
    }
    // Warm-up term: d Z^0_i / d rho_{0,i} = t0 Z^0_i.
    {
        const double c = t0 * std::exp(alog + zlog[0] - log_value);
        for (std::size_t i = 1; i + 1 < n; ++i) grad[i] += c * a[i] * z[i];
    }
    const double inv = 1.0 / (rho.tgrid().dt() * sg.dx());
    for (auto& v : grad) v *= inv;
    return {log_value, SpaceTimeDeviation(rho.tgrid(), sg, std::move(grad))};
}

/// Gradient of rho -> Z(rho; T, x) as a space-time density: Z(s,y) A(s,y).
inline SpaceTimeDeviation terminal_gradient(const SpaceTimeDeviation& rho, double x = 0.0,
                                            const SolverConfig& cfg = {}) {
    auto r = log_terminal_gradient(rho, x, cfg);
    return r.gradient.scaled(std::exp(r.log_value));
}

// ---------------------------------------------------------------------------
// Kernel (chaos) series

namespace detail {

/// Banded matrix of the exact Gaussian semigroup G_h on the grid, trapezoid weights.
class GaussianSmoother {
public:
    GaussianSmoother(const SpaceGrid& sg, double h) : n_(sg.size()), w_(sg.dx()) {
        const double cutoff = std::sqrt(2.0 * h * 45.0);
        band_ = static_cast<std::size_t>(std::ceil(cutoff / sg.dx()));
        band_ = std::min(band_, n_ - 1);
        taps_.resize(band_ + 1);
        for (std::size_t d = 0; d <= band_; ++d) taps_[d] = heat_kernel(h, static_cast<double>(d) * sg.dx());
    }

    void apply(std::span<const double> f, std::span<double> out) const {
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t lo = i > band_ ? i - band_ : 0;
            const std::size_t hi = std::min(n_ - 1, i + band_);
            double s = 0.0;
            for (std::size_t j = lo; j <= hi; ++j) {
                const double wj = (j == 0 || j + 1 == n_) ? 0.5 * w_ : w_;
                s += wj * taps_[i > j ? i - j : j - i] * f[j];
            }
            out[i] = s;
        }
    }

private:
    std::size_t n_;
    double w_;
    std::size_t band_ = 0;
    std::vector<double> taps_;
};

/// Advances the series terms Z_0..Z_order over rho's time cells from t0,
/// calling obs(k, terms) at each cell boundary.
template <class Obs>
void chaos_sweep(const SpaceTimeDeviation& rho, std::size_t order, double t0, Obs&& obs) {
    const auto& sg = rho.sgrid();
    const auto& tg = rho.tgrid();
    const std::size_t n = sg.size();
    if (!(t0 < tg.dt())) throw ConfigError("chaos series: delta_warmup must be smaller than the time step");
    std::vector<std::vector<double>> terms(order + 1, std::vector<double>(n, 0.0));
    auto exact = [&](double t, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) out[i] = heat_kernel(t, sg.x(i));
    };
    exact(t0, terms[0]);
    if (order >= 1) {
        auto r0 = rho.row(0);
        for (std::size_t i = 0; i < n; ++i) terms[1][i] = t0 * r0[i] * terms[0][i];
    }
    obs(std::size_t{0}, terms);
    std::vector<double> src(n), smoothed(n), next(n);
    std::vector<std::vector<double>> updated(order + 1, std::vector<double>(n));
    const GaussianSmoother g_first(sg, tg.t(1) - t0);
    const GaussianSmoother g_step(sg, tg.dt());
    double t = t0;
    for (std::size_t k = 0; k < tg.n_steps(); ++k) {
        const double t_next = tg.t(k + 1);
        const double h = t_next - t;
        const GaussianSmoother& g = (k == 0) ? g_first : g_step;
        auto r = rho.row(k);
        exact(t_next, updated[0]);
        for (std::size_t m = 1; m <= order; ++m) {
            g.apply(terms[m], next);
            for (std::size_t i = 0; i < n; ++i) src[i] = r[i] * terms[m - 1][i];
            g.apply(src, smoothed);
            for (std::size_t i = 0; i < n; ++i) {
                updated[m][i] = next[i] + 0.5 * h * (smoothed[i] + r[i] * updated[m - 1][i]);
            }
        }
        terms.swap(updated);
        t = t_next;
        obs(k + 1, terms);
    }
}

}  // namespace detail

/// Values Z_0(t,x), ..., Z_order(t,x) of the individual series terms.
inline std::vector<double> chaos_terms(const SpaceTimeDeviation& rho, double t, double x, std::size_t order,
                                       double t0 = 1e-3) {
    const std::size_t kt = rho.tgrid().index_of(t);
    if (kt == 0) throw DomainError("chaos_terms: t must be a positive grid time");
    const std::size_t ix = rho.sgrid().nearest(x);
    if (order == 0) return {heat_kernel(t, rho.sgrid().x(ix))};
    std::vector<double> out;
    detail::chaos_sweep(rho, order, t0, [&](std::size_t k, const std::vector<std::vector<double>>& terms) {
        if (k == kt) {
            for (const auto& term : terms) out.push_back(term[ix]);
        }
    });
    return out;
}

/// Partial sum of the kernel series through the given order.
inline double chaos_series_point(const SpaceTimeDeviation& rho, double t, double x, std::size_t order,
                                 double t0 = 1e-3) {
    if (order == 0) return heat_kernel(t, x);
    const auto terms = chaos_terms(rho, t, x, order, t0);
    double s = 0.0;
    for (double v : terms) s += v;
    return s;
}

inline Field chaos_field(const SpaceTimeDeviation& rho, const SolverConfig& cfg) {
    cfg.validate();
    const std::size_t n = rho.sgrid().size();
    std::vector<double> values((rho.rows() + 1) * n, 0.0);
    detail::chaos_sweep(rho, cfg.chaos_order, cfg.delta_warmup,
                        [&](std::size_t k, const std::vector<std::vector<double>>& terms) {
                            for (const auto& term : terms) {
                                for (std::size_t i = 0; i < n; ++i) values[k * n + i] += term[i];
                            }
                        });
    detail::check_state(values, rho.rows(), false);
    return Field(rho.tgrid(), rho.sgrid(), std::move(values));
}

// ---------------------------------------------------------------------------
// Operator norm

struct OperatorNorm {
    double value;
    std::size_t iterations;
    bool converged;
};

/// Power iteration on P^T P for P = P(rho; s -> t); returns sqrt of the top
/// Rayleigh quotient. The start vector is positive and seeded.
inline OperatorNorm operator_norm(const SpaceTimeDeviation& rho, double s, double t, std::size_t iters,
                                  double tolerance = 1e-8, std::uint64_t seed = 0x5eed) {
    if (iters < 10) throw DomainError("operator_norm: need at least 10 iterations");
    if (!(s < t)) throw DomainError("operator_norm: need s < t");
    const auto& tg = rho.tgrid();
    const std::size_t k0 = tg.index_of(s);
    const std::size_t k1 = tg.index_of(t);
    const std::size_t n = rho.sgrid().size();
    const double dx = rho.sgrid().dx();
    const double dt = tg.dt();
    RandomStream rng(seed, 0);
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) v[i] = 0.5 + rng.uniform();
    auto norm = [&](std::span<const double> u) {
        double acc = 0.0;
        for (double e : u) acc += e * e;
        return std::sqrt(acc);
    };
    detail::StepKernel kernel(n);
    double estimate = 0.0;
    double prev = 0.0;
    std::size_t it = 0;
    bool converged = false;
    {
        const double nv = norm(v);
        for (auto& e : v) e /= nv;
    }
    while (it < iters) {
        ++it;
        std::vector<double> w(v);
        for (std::size_t k = k0; k < k1; ++k) kernel.apply(w, rho.row(k), dt, 0.5, dx);
        const double pv = norm(w);
        for (std::size_t k = k1; k-- > k0;) kernel.apply(w, rho.row(k), dt, 0.5, dx);
        // ||P v||^2 with ||v|| = 1 is the Rayleigh quotient of P^T P.
        estimate = pv;
        const double nw = norm(w);
        if (!(nw > 0.0) || !std::isfinite(nw)) throw SolverError("operator_norm: iteration collapsed");
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
        if (it > 1 && std::abs(estimate - prev) <= tolerance * estimate) {
            converged = true;
            break;
        }
        prev = estimate;
    }
    return {estimate, it, converged};
}

}  // namespace wnkpz
