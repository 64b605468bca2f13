#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>

#include "levyhedge/errors.hpp"
#include "levyhedge/levy_model.hpp"
#include "levyhedge/payoff.hpp"
#include "levyhedge/quadrature.hpp"
#include "levyhedge/surface_fn.hpp"

namespace levyhedge {

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Grid estimate of f(t, x). Rows follow t_grid, columns follow x_grid.
template <class Scalar>
struct BasicValueSurface {
    VectorX<Scalar> t_grid;
    VectorX<Scalar> x_grid;
    MatrixX<Scalar> values;
    MatrixX<Scalar> std_err;
    Payoff payoff = Payoff::constant(1.0);
    double horizon = 0.0;
    std::size_t n_paths_per_node = 0;
    std::uint64_t seed = 0;
};

using ValueSurface = BasicValueSurface<double>;

/// n equally spaced points from a to b inclusive.
template <class Scalar = double>
VectorX<Scalar> uniform_grid(Scalar a, Scalar b, Eigen::Index n) {
    if (n < 2) throw ModelError("a grid needs at least two nodes");
    return VectorX<Scalar>::LinSpaced(n, a, b);
}

inline constexpr Eigen::Index default_grid_nodes = 81;

/// u + mu T + 5 sqrt(m2 T).
double default_x_max(const LevyModel& model, double horizon);

namespace detail {

template <class Scalar>
struct Stencil {
    Eigen::Index center;  ///< middle node of the three used
    Scalar wl, wc, wr;
};

/// Three-point second-order weights for f'(grid(i)) on a non-uniform grid of
/// at least three nodes. Central inside, one-sided at both ends.
template <class Scalar>
Stencil<Scalar> stencil_weights(const VectorX<Scalar>& grid, Eigen::Index i) {
    const Eigen::Index n = grid.size();
    const Eigen::Index c = std::clamp<Eigen::Index>(i, 1, n - 2);
    const Scalar h1 = grid(c) - grid(c - 1);
    const Scalar h2 = grid(c + 1) - grid(c);
    if (i == 0)
        return {c, -(2 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2), -h1 / (h2 * (h1 + h2))};
    if (i == n - 1)
        return {c, h2 / (h1 * (h1 + h2)), -(h1 + h2) / (h1 * h2), (2 * h2 + h1) / (h2 * (h1 + h2))};
    return {c, -h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))};
}

/// First derivative along the grid for every column of `values` (rows index
/// the grid).
template <class Scalar, class Derived>
MatrixX<Scalar> grid_derivative(const VectorX<Scalar>& grid, const Eigen::MatrixBase<Derived>& values) {
    const Eigen::Index n = grid.size();
    MatrixX<Scalar> out(values.rows(), values.cols());
    if (n == 2) {
        const auto slope = ((values.row(1) - values.row(0)) / (grid(1) - grid(0))).eval();
        out.row(0) = slope;
        out.row(1) = slope;
        return out;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto s = stencil_weights(grid, i);
        out.row(i) = s.wl * values.row(s.center - 1) + s.wc * values.row(s.center) + s.wr * values.row(s.center + 1);
    }
    return out;
}

/// Cell index k with grid(k) <= v <= grid(k+1), v already clamped to the grid.
template <class Scalar>
Eigen::Index locate(const VectorX<Scalar>& grid, Scalar v) {
    const auto* begin = grid.data();
    const auto* end = begin + grid.size();
    auto k = static_cast<Eigen::Index>(std::upper_bound(begin, end, v) - begin) - 1;
    return std::clamp<Eigen::Index>(k, 0, grid.size() - 2);
}

}  // namespace detail

/// Bilinear interpolant of a value surface. f = 0 for x < 0; constant
/// extension in t outside [t_0, t_N] and in x beyond the grid ends.
/// Derivatives are nodal second-order differences, interpolated bilinearly.
template <class Scalar>
class GridSurface {
public:
    explicit GridSurface(const BasicValueSurface<Scalar>& surface)
        : t_(surface.t_grid), x_(surface.x_grid), f_(surface.values) {
        if (t_.size() < 2 || x_.size() < 2) throw ModelError("grid surface needs at least 2x2 nodes");
        ft_ = detail::grid_derivative(t_, f_);
        fx_ = detail::grid_derivative(x_, f_.transpose()).transpose();
    }

    Scalar value(double t, double x) const { return interpolate(f_, t, x, false); }
    Scalar dt(double t, double x) const { return interpolate(ft_, t, x, false); }
    Scalar dx(double t, double x) const { return interpolate(fx_, t, x, true); }

    /// Piecewise-linear slice in x at time t, with constant pieces below the
    /// first node and beyond the last one.
    PiecewisePoly x_slice(double t) const {
        const auto [k, w] = time_weights(t);
        const Eigen::Index n = x_.size();
        PiecewisePoly pieces;
        pieces.reserve(static_cast<std::size_t>(n) + 1);
        auto row = [&](Eigen::Index j) { return double((1 - w) * f_(k, j) + w * f_(k + 1, j)); };
        if (x_(0) > 0) {
            PolyPiece p;
            p.lo = 0.0;
            p.hi = double(x_(0));
            p.c[0] = row(0);
            pieces.push_back(p);
        }
        for (Eigen::Index j = 0; j + 1 < n; ++j) {
            PolyPiece p;
            p.lo = double(x_(j));
            p.hi = double(x_(j + 1));
            p.degree = 1;
            p.c[0] = row(j);
            p.c[1] = (row(j + 1) - row(j)) / (p.hi - p.lo);
            pieces.push_back(p);
        }
        PolyPiece tail;
        tail.lo = double(x_(n - 1));
        tail.hi = std::numeric_limits<double>::infinity();
        tail.c[0] = row(n - 1);
        pieces.push_back(tail);
        return pieces;
    }

    const VectorX<Scalar>& t_grid() const noexcept { return t_; }
    const VectorX<Scalar>& x_grid() const noexcept { return x_; }
    const MatrixX<Scalar>& time_derivative() const noexcept { return ft_; }
    const MatrixX<Scalar>& space_derivative() const noexcept { return fx_; }

private:
    std::pair<Eigen::Index, Scalar> time_weights(double t) const {
        const Scalar tc = std::clamp(Scalar(t), t_(0), t_(t_.size() - 1));
        const Eigen::Index k = detail::locate(t_, tc);
        return {k, (tc - t_(k)) / (t_(k + 1) - t_(k))};
    }

    Scalar interpolate(const MatrixX<Scalar>& m, double t, double x, bool zero_outside) const {
        if (x < 0.0) return Scalar(0);
        const Scalar lo = x_(0);
        const Scalar hi = x_(x_.size() - 1);
        if (zero_outside && (Scalar(x) < lo || Scalar(x) > hi)) return Scalar(0);
        const Scalar xc = std::clamp(Scalar(x), lo, hi);
        const auto [k, w] = time_weights(t);
        const Eigen::Index j = detail::locate(x_, xc);
        const Scalar v = (xc - x_(j)) / (x_(j + 1) - x_(j));
        return (1 - w) * ((1 - v) * m(k, j) + v * m(k, j + 1)) + w * ((1 - v) * m(k + 1, j) + v * m(k + 1, j + 1));
    }

    VectorX<Scalar> t_;
    VectorX<Scalar> x_;
    MatrixX<Scalar> f_;
    MatrixX<Scalar> ft_;
    MatrixX<Scalar> fx_;
};

template <class Scalar>
GridSurface<Scalar> as_surface_fn(const BasicValueSurface<Scalar>& surface) {
    return GridSurface<Scalar>(surface);
}

struct SurfaceOptions {
    std::size_t n_paths = 100000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    /// Required for beta != 0: the result is then the killed expectation
    /// E[F(X_T) 1{tau > T} | X_t = x], not a class-(*) solution.
    bool nonmartingale_ack = false;
};

/// Monte-Carlo estimate of f(t, x) = E[F(X_T) 1{tau > T} | X_t = x] on the
/// grid. t_grid must end at T. Paths for a time row are shared across x-nodes.
ValueSurface estimate_surface(const LevyModel& model, const Payoff& payoff, double horizon,
                              const Eigen::VectorXd& t_grid, const Eigen::VectorXd& x_grid,
                              const SurfaceOptions& options);

/// Same on the default 81 x 81 grid over [0, T] x [0, default_x_max].
ValueSurface estimate_surface(const LevyModel& model, const Payoff& payoff, double horizon,
                              const SurfaceOptions& options);

struct PideResidual {
    Eigen::MatrixXd residual;     ///< A f at every node; NaN where x <= 0
    Eigen::MatrixXd noise_bound;  ///< one standard deviation of MC noise
    Eigen::MatrixXd quad_error;
    /// Fraction of interior nodes with |residual| <= factor * noise_bound.
    double interior_fraction_within(double factor) const;
};

PideResidual pide_residual(const ValueSurface& surface, const LevyModel& model, const QuadSpec& quad);

/// Largest |f(T, x) - F(x)| over the terminal row.
double boundary_error(const ValueSurface& surface);

}  // namespace levyhedge
