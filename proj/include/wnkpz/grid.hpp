// SPDX-License-Identifier: MIT
//
// Uniform 1-D space grids, time grids and the sampled objects that live on
// them: potentials phi(x), space-time deviations rho(t,x) and solution
// fields Z(t,x). The real line is truncated to [-L, L] with a zero
// extension outside; the node set always contains x = 0.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wnkpz/error.hpp"

namespace wnkpz {

class SpaceGrid {
public:
    SpaceGrid(double half_width, std::size_t n_points)
        : half_width_(half_width), n_points_(n_points) {
        if (!(half_width > 0.0) || !std::isfinite(half_width)) {
            throw ConfigError("SpaceGrid: half_width must be positive and finite");
        }
        if (n_points < 3 || n_points % 2 == 0) {
            throw ConfigError("SpaceGrid: n_points must be odd and >= 3");
        }
        center_ = (n_points - 1) / 2;
        dx_ = half_width / static_cast<double>(center_);
    }

    /// Grid on [-L, L] whose spacing is as close to `dx` as an odd node count allows.
    static SpaceGrid with_spacing(double half_width, double dx) {
        if (!(dx > 0.0)) throw ConfigError("SpaceGrid: spacing must be positive");
        auto half = static_cast<std::size_t>(std::llround(half_width / dx));
        return SpaceGrid(half_width, 2 * std::max<std::size_t>(half, 1) + 1);
    }

    [[nodiscard]] double half_width() const { return half_width_; }
    [[nodiscard]] std::size_t size() const { return n_points_; }
    [[nodiscard]] double dx() const { return dx_; }
    [[nodiscard]] std::size_t center() const { return center_; }

    // (i - center) is an exact integer, so node i and node n-1-i are exact negatives.
    [[nodiscard]] double x(std::size_t i) const {
        return (static_cast<double>(i) - static_cast<double>(center_)) * dx_;
    }

    /// Trapezoid weight of node i.
    [[nodiscard]] double weight(std::size_t i) const {
        return (i == 0 || i + 1 == n_points_) ? 0.5 * dx_ : dx_;
    }

    /// Index of the node nearest to x; throws if x lies outside the grid.
    [[nodiscard]] std::size_t nearest(double x) const {
        if (std::abs(x) > half_width_ * (1.0 + 1e-12)) {
            throw DomainError("SpaceGrid: x = " + std::to_string(x) + " outside [-L, L]");
        }
        auto k = std::llround(x / dx_) + static_cast<long long>(center_);
        return static_cast<std::size_t>(std::clamp<long long>(k, 0, static_cast<long long>(n_points_) - 1));
    }

    bool operator==(const SpaceGrid& o) const {
        return n_points_ == o.n_points_ && half_width_ == o.half_width_;
    }

private:
    double half_width_;
    std::size_t n_points_;
    std::size_t center_ = 0;
    double dx_ = 0.0;
};

class TimeGrid {
public:
    TimeGrid(double t_start, double t_end, std::size_t n_steps)
        : t_start_(t_start), t_end_(t_end), n_steps_(n_steps) {
        if (!(t_start >= 0.0) || !(t_end > t_start) || !std::isfinite(t_end)) {
            throw ConfigError("TimeGrid: need 0 <= t_start < t_end");
        }
        if (n_steps == 0) throw ConfigError("TimeGrid: n_steps must be positive");
        dt_ = (t_end - t_start) / static_cast<double>(n_steps);
    }

    static TimeGrid with_step(double t_start, double t_end, double dt) {
        if (!(dt > 0.0)) throw ConfigError("TimeGrid: step must be positive");
        auto n = static_cast<std::size_t>(std::llround((t_end - t_start) / dt));
        return TimeGrid(t_start, t_end, std::max<std::size_t>(n, 1));
    }

    [[nodiscard]] double t_start() const { return t_start_; }
    [[nodiscard]] double t_end() const { return t_end_; }
    [[nodiscard]] std::size_t n_steps() const { return n_steps_; }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] double t(std::size_t k) const {
        return k == n_steps_ ? t_end_ : t_start_ + static_cast<double>(k) * dt_;
    }

    /// Index k with t(k) == t up to 1e-9 relative; throws otherwise.
    [[nodiscard]] std::size_t index_of(double t) const {
        double r = (t - t_start_) / dt_;
        auto k = std::llround(r);
        if (k < 0 || k > static_cast<long long>(n_steps_) || std::abs(r - static_cast<double>(k)) > 1e-6) {
            throw DomainError("TimeGrid: t = " + std::to_string(t) + " is not a grid time");
        }
        return static_cast<std::size_t>(k);
    }

    bool operator==(const TimeGrid& o) const {
        return n_steps_ == o.n_steps_ && t_start_ == o.t_start_ && t_end_ == o.t_end_;
    }

private:
    double t_start_;
    double t_end_;
    std::size_t n_steps_;
    double dt_ = 0.0;
};

namespace detail {
inline void require_finite(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite value");
    }
}
}  // namespace detail

/// A real function of space sampled on a SpaceGrid.
class Potential {
public:
    Potential(SpaceGrid grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.size()) {
            throw DomainError("Potential: value count does not match grid");
        }
        detail::require_finite(values_, "Potential");
    }

    template <class F>
    static Potential sample(const SpaceGrid& grid, F&& f) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.x(i));
        return Potential(grid, std::move(v));
    }

    static Potential zero(const SpaceGrid& grid) {
        return Potential(grid, std::vector<double>(grid.size(), 0.0));
    }

    [[nodiscard]] const SpaceGrid& grid() const { return grid_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Piecewise-linear interpolant, zero outside [-L, L].
    [[nodiscard]] double at(double x) const {
        const double u = (x + grid_.half_width()) / grid_.dx();
        if (!(u >= 0.0) || u > static_cast<double>(values_.size() - 1)) return 0.0;
        auto i = static_cast<std::size_t>(u);
        if (i + 1 >= values_.size()) return values_.back();
        const double f = u - static_cast<double>(i);
        return values_[i] + f * (values_[i + 1] - values_[i]);
    }

    [[nodiscard]] Potential scaled(double c) const {
        std::vector<double> v(values_);
        for (auto& e : v) e *= c;
        return Potential(grid_, std::move(v));
    }

    [[nodiscard]] Potential plus(const Potential& o, double c = 1.0) const {
        if (!(o.grid_ == grid_)) throw DomainError("Potential: grid mismatch");
        std::vector<double> v(values_);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += c * o.values_[i];
        return Potential(grid_, std::move(v));
    }

private:
    SpaceGrid grid_;
    std::vector<double> values_;
};

/// rho(t, x) on TimeGrid x SpaceGrid. Row k holds the value on the time
/// cell [t_k, t_{k+1}), so there are n_steps rows of n_points values.
class SpaceTimeDeviation {
public:
    SpaceTimeDeviation(TimeGrid tgrid, SpaceGrid sgrid, std::vector<double> values)
        : tgrid_(std::move(tgrid)), sgrid_(std::move(sgrid)), values_(std::move(values)) {
        if (values_.size() != tgrid_.n_steps() * sgrid_.size()) {
            throw DomainError("SpaceTimeDeviation: value count does not match grids");
        }
        detail::require_finite(values_, "SpaceTimeDeviation");
    }

    /// Samples f(t_k, x_i) at the left endpoint of each time cell.
    template <class F>
    static SpaceTimeDeviation sample(const TimeGrid& tg, const SpaceGrid& sg, F&& f) {
        std::vector<double> v(tg.n_steps() * sg.size());
        for (std::size_t k = 0; k < tg.n_steps(); ++k) {
            for (std::size_t i = 0; i < sg.size(); ++i) v[k * sg.size() + i] = f(tg.t(k), sg.x(i));
        }
        return SpaceTimeDeviation(tg, sg, std::move(v));
    }

    static SpaceTimeDeviation constant_in_time(const TimeGrid& tg, const Potential& phi) {
        const auto& sg = phi.grid();
        std::vector<double> v(tg.n_steps() * sg.size());
        for (std::size_t k = 0; k < tg.n_steps(); ++k) {
            std::copy(phi.values().begin(), phi.values().end(), v.begin() + static_cast<std::ptrdiff_t>(k * sg.size()));
        }
        return SpaceTimeDeviation(tg, sg, std::move(v));
    }

    static SpaceTimeDeviation zero(const TimeGrid& tg, const SpaceGrid& sg) {
        return SpaceTimeDeviation(tg, sg, std::vector<double>(tg.n_steps() * sg.size(), 0.0));
    }

    [[nodiscard]] const TimeGrid& tgrid() const { return tgrid_; }
    [[nodiscard]] const SpaceGrid& sgrid() const { return sgrid_; }
    [[nodiscard]] std::size_t rows() const { return tgrid_.n_steps(); }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<const double> row(std::size_t k) const {
        return std::span<const double>(values_).subspan(k * sgrid_.size(), sgrid_.size());
    }
    [[nodiscard]] double operator()(std::size_t k, std::size_t i) const { return values_[k * sgrid_.size() + i]; }
    [[nodiscard]] Potential slice(std::size_t k) const {
        auto r = row(k);
        return Potential(sgrid_, std::vector<double>(r.begin(), r.end()));
    }

    [[nodiscard]] SpaceTimeDeviation scaled(double c) const {
        std::vector<double> v(values_);
        for (auto& e : v) e *= c;
        return SpaceTimeDeviation(tgrid_, sgrid_, std::move(v));
    }

    /// Copy with a single entry replaced (finite-difference probes).
    [[nodiscard]] SpaceTimeDeviation with_entry(std::size_t k, std::size_t i, double value) const {
        std::vector<double> v(values_);
        v[k * sgrid_.size() + i] = value;
        return SpaceTimeDeviation(tgrid_, sgrid_, std::move(v));
    }

    [[nodiscard]] SpaceTimeDeviation minus(const SpaceTimeDeviation& o) const {
        if (!(o.tgrid_ == tgrid_) || !(o.sgrid_ == sgrid_)) throw DomainError("SpaceTimeDeviation: grid mismatch");
        std::vector<double> v(values_);
        for (std::size_t j = 0; j < v.size(); ++j) v[j] -= o.values_[j];
        return SpaceTimeDeviation(tgrid_, sgrid_, std::move(v));
    }

    /// Rows time-reversed: row k of the result is row (n-1-k) of this.
    [[nodiscard]] SpaceTimeDeviation reversed() const {
        std::vector<double> v(values_.size());
        const std::size_t n = sgrid_.size();
        for (std::size_t k = 0; k < rows(); ++k) {
            auto r = row(rows() - 1 - k);
            std::copy(r.begin(), r.end(), v.begin() + static_cast<std::ptrdiff_t>(k * n));
        }
        return SpaceTimeDeviation(tgrid_, sgrid_, std::move(v));
    }

private:
    TimeGrid tgrid_;
    SpaceGrid sgrid_;
    std::vector<double> values_;
};

/// Z(t, x) on the nodes of TimeGrid x SpaceGrid: n_steps + 1 rows.
class Field {
public:
    Field(TimeGrid tgrid, SpaceGrid sgrid, std::vector<double> values)
        : tgrid_(std::move(tgrid)), sgrid_(std::move(sgrid)), values_(std::move(values)) {
        if (values_.size() != (tgrid_.n_steps() + 1) * sgrid_.size()) {
            throw DomainError("Field: value count does not match grids");
        }
        strictly_positive_ = true;
        const std::size_t n = sgrid_.size();
        for (std::size_t k = 0; k <= tgrid_.n_steps(); ++k) {
            for (std::size_t i = 1; i + 1 < n; ++i) {
                if (!(values_[k * n + i] > 0.0)) strictly_positive_ = false;
            }
        }
    }

    [[nodiscard]] const TimeGrid& tgrid() const { return tgrid_; }
    [[nodiscard]] const SpaceGrid& sgrid() const { return sgrid_; }
    [[nodiscard]] std::size_t rows() const { return tgrid_.n_steps() + 1; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<const double> row(std::size_t k) const {
        return std::span<const double>(values_).subspan(k * sgrid_.size(), sgrid_.size());
    }
    [[nodiscard]] double operator()(std::size_t k, std::size_t i) const { return values_[k * sgrid_.size() + i]; }
    /// Interior nodes only; the Dirichlet walls are zero by construction.
    [[nodiscard]] bool strictly_positive() const { return strictly_positive_; }
    [[nodiscard]] Potential slice(std::size_t k) const {
        auto r = row(k);
        return Potential(sgrid_, std::vector<double>(r.begin(), r.end()));
    }

private:
    TimeGrid tgrid_;
    SpaceGrid sgrid_;
    std::vector<double> values_;
    bool strictly_positive_ = false;
};

/// Gaussian heat kernel p(t, x) = (2 pi t)^{-1/2} exp(-x^2 / 2t).
inline double heat_kernel(double t, double x) {
    if (!(t > 0.0)) throw DomainError("heat_kernel: t must be positive");
    return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

/// Trapezoid inner product <f, g> on a shared grid.
inline double inner(const Potential& f, const Potential& g) {
    if (!(f.grid() == g.grid())) throw DomainError("inner: grid mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.grid().weight(i) * f[i] * g[i];
    return s;
}

inline double l2_norm_space(const Potential& f) { return std::sqrt(inner(f, f)); }

inline double lp_norm_space(const Potential& f, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.grid().weight(i) * std::pow(std::abs(f[i]), p);
    return std::pow(s, 1.0 / p);
}

/// Squared space-time L2 norm: trapezoid in space, left rectangle in time.
inline double l2_norm_spacetime_sq(const SpaceTimeDeviation& rho) {
    const auto& sg = rho.sgrid();
    double s = 0.0;
    for (std::size_t k = 0; k < rho.rows(); ++k) {
        auto r = rho.row(k);
        double row_sum = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) row_sum += sg.weight(i) * r[i] * r[i];
        s += row_sum;
    }
    return s * rho.tgrid().dt();
}

inline double l2_norm_spacetime(const SpaceTimeDeviation& rho) { return std::sqrt(l2_norm_spacetime_sq(rho)); }

}  // namespace wnkpz
