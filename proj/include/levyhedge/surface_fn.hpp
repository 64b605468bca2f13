#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <utility>
#include <vector>

#include "levyhedge/errors.hpp"

namespace levyhedge {

/// f(t, x) together with its first partial derivatives.
template <class S>
concept SurfaceFn = requires(const S& s, double t, double x) {
    { s.value(t, x) } -> std::convertible_to<double>;
    { s.dt(t, x) } -> std::convertible_to<double>;
    { s.dx(t, x) } -> std::convertible_to<double>;
};

inline constexpr int max_piece_degree = 4;

/// Polynomial in the local variable s = z - lo on [lo, hi]; hi may be +inf.
struct PolyPiece {
    double lo = 0.0;
    double hi = 0.0;
    std::array<double, max_piece_degree + 1> c{};
    int degree = 0;

    double operator()(double z) const {
        const double s = z - lo;
        double acc = c[degree];
        for (int k = degree - 1; k >= 0; --k) acc = acc * s + c[k];
        return acc;
    }
};

using PiecewisePoly = std::vector<PolyPiece>;

/// Surfaces whose x-slices at fixed t are piecewise polynomial on [0, inf).
template <class S>
concept XSliceable = SurfaceFn<S> && requires(const S& s, double t) {
    { s.x_slice(t) } -> std::convertible_to<PiecewisePoly>;
};

namespace poly {

inline PolyPiece scaled(PolyPiece p, double a) {
    for (int k = 0; k <= p.degree; ++k) p.c[k] *= a;
    return p;
}

inline PolyPiece minus_constant(PolyPiece p, double a) {
    p.c[0] -= a;
    return p;
}

inline PolyPiece product(const PolyPiece& p, const PolyPiece& q) {
    if (p.degree + q.degree > max_piece_degree) throw ModelError("piecewise polynomial degree overflow");
    PolyPiece r;
    r.lo = p.lo;
    r.hi = p.hi;
    r.degree = p.degree + q.degree;
    for (int i = 0; i <= p.degree; ++i)
        for (int j = 0; j <= q.degree; ++j) r.c[i + j] += p.c[i] * q.c[j];
    return r;
}

/// Multiplies by (z - x0), expressed in the piece's local variable.
inline PolyPiece times_shifted_z(const PolyPiece& p, double x0) {
    PolyPiece line;
    line.lo = p.lo;
    line.hi = p.hi;
    line.degree = 1;
    line.c[0] = p.lo - x0;
    line.c[1] = 1.0;
    return product(p, line);
}

/// Coefficients of q(r) = p(b - r) for the piece p, i.e. re-expanded at b.
inline std::array<double, max_piece_degree + 1> reflect_at(const PolyPiece& p, double b) {
    // p(z) = sum_k c_k (H - r)^k with H = b - lo.
    const double H = b - p.lo;
    std::array<double, max_piece_degree + 1> out{};
    for (int k = 0; k <= p.degree; ++k) {
        double binom = 1.0;
        double hpow = std::pow(H, k);
        const double hinv = H != 0.0 ? 1.0 / H : 0.0;
        for (int m = 0; m <= k; ++m) {
            // term: c_k * C(k,m) * H^{k-m} * (-r)^m
            double hk = H != 0.0 ? hpow : (k - m == 0 ? 1.0 : 0.0);
            out[m] += p.c[k] * binom * hk * ((m % 2) ? -1.0 : 1.0);
            binom = binom * static_cast<double>(k - m) / static_cast<double>(m + 1);
            hpow *= hinv;
        }
    }
    return out;
}

/// G_k(w) = int_0^w r^k delta exp(-delta r) dr for k = 0..degree.
inline std::array<double, max_piece_degree + 1> decay_moments(double w, double delta, int degree) {
    std::array<double, max_piece_degree + 1> g{};
    const double v = delta * w;
    if (v <= 1.0) {
        for (int k = 0; k <= degree; ++k) {
            double sum = 0.0;
            double term = v;  // (-1)^n v^{n+1} / n!
            for (int n = 0; n < 40; ++n) {
                const double add = term / static_cast<double>(n + k + 1);
                sum += add;
                if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
                term *= -v / static_cast<double>(n + 1);
            }
            g[k] = std::pow(w, k) * sum;
        }
    } else {
        const double decay = std::exp(-v);
        g[0] = -std::expm1(-v);
        double wk = 1.0;
        for (int k = 1; k <= degree; ++k) {
            wk *= w;
            g[k] = static_cast<double>(k) / delta * g[k - 1] - wk * decay;
        }
    }
    return g;
}

/// int_a^b g(z) delta exp(delta (z - x)) dz for b <= x, with g piecewise
/// polynomial. Each piece is re-expanded at its right end so every
/// exponential factor stays in (0, 1].
inline double exp_weighted_integral(const PiecewisePoly& g, double a, double b, double delta, double x) {
    double total = 0.0;
    for (const auto& piece : g) {
        const double lo = std::max(piece.lo, a);
        const double hi = std::min(piece.hi, b);
        if (!(hi > lo)) continue;
        const auto q = reflect_at(piece, hi);
        const auto moments = decay_moments(hi - lo, delta, piece.degree);
        double acc = 0.0;
        for (int k = 0; k <= piece.degree; ++k) acc += q[k] * moments[k];
        total += std::exp(delta * (hi - x)) * acc;
    }
    return total;
}

}  // namespace poly

// ---------------------------------------------------------------------------
// Expression types. Each one is itself a SurfaceFn, and forwards x-slices when
// the wrapped surface has them.
// ---------------------------------------------------------------------------

struct ConstantSurface {
    double c = 0.0;

    double value(double, double) const { return c; }
    double dt(double, double) const { return 0.0; }
    double dx(double, double) const { return 0.0; }
    PiecewisePoly x_slice(double) const {
        PolyPiece p;
        p.lo = 0.0;
        p.hi = std::numeric_limits<double>::infinity();
        p.c[0] = c;
        return {p};
    }
};

/// K(t, x) = x f(t, x).
template <SurfaceFn S>
struct TimesX {
    S inner;

    double value(double t, double x) const { return x * inner.value(t, x); }
    double dt(double t, double x) const { return x * inner.dt(t, x); }
    double dx(double t, double x) const { return inner.value(t, x) + x * inner.dx(t, x); }
    PiecewisePoly x_slice(double t) const
        requires XSliceable<S>
    {
        auto slice = inner.x_slice(t);
        for (auto& p : slice) p = poly::times_shifted_z(p, 0.0);
        return slice;
    }
};

/// f(t, x)^2.
template <SurfaceFn S>
struct Squared {
    S inner;

    double value(double t, double x) const {
        const double v = inner.value(t, x);
        return v * v;
    }
    double dt(double t, double x) const { return 2.0 * inner.value(t, x) * inner.dt(t, x); }
    double dx(double t, double x) const { return 2.0 * inner.value(t, x) * inner.dx(t, x); }
    PiecewisePoly x_slice(double t) const
        requires XSliceable<S>
    {
        auto slice = inner.x_slice(t);
        for (auto& p : slice) p = poly::product(p, p);
        return slice;
    }
};

template <SurfaceFn S>
struct Scaled {
    S inner;
    double factor = 1.0;

    double value(double t, double x) const { return factor * inner.value(t, x); }
    double dt(double t, double x) const { return factor * inner.dt(t, x); }
    double dx(double t, double x) const { return factor * inner.dx(t, x); }
    PiecewisePoly x_slice(double t) const
        requires XSliceable<S>
    {
        auto slice = inner.x_slice(t);
        for (auto& p : slice) p = poly::scaled(p, factor);
        return slice;
    }
};

template <SurfaceFn A, SurfaceFn B>
struct Sum {
    A first;
    B second;

    double value(double t, double x) const { return first.value(t, x) + second.value(t, x); }
    double dt(double t, double x) const { return first.dt(t, x) + second.dt(t, x); }
    double dx(double t, double x) const { return first.dx(t, x) + second.dx(t, x); }
};

template <SurfaceFn S>
TimesX<S> times_x(S s) { return {std::move(s)}; }
template <SurfaceFn S>
Squared<S> squared(S s) { return {std::move(s)}; }
template <SurfaceFn S>
Scaled<S> scaled(S s, double a) { return {std::move(s), a}; }
template <SurfaceFn A, SurfaceFn B>
Sum<A, B> operator+(A a, B b) { return {std::move(a), std::move(b)}; }

/// Surface given by callables. Derivatives default to second-order finite
/// differences (central inside [t_min, t_max], one-sided at the ends).
template <class F, class Ft = std::nullptr_t, class Fx = std::nullptr_t>
struct FunctionSurface {
    F f;
    Ft ft = nullptr;
    Fx fx = nullptr;
    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();
    double step = 1e-5;

    double value(double t, double x) const { return f(t, x); }

    double dt(double t, double x) const {
        if constexpr (!std::is_same_v<Ft, std::nullptr_t>) {
            return ft(t, x);
        } else {
            const double h = step * std::max(1.0, std::abs(t));
            if (t - h < t_min) return (-3.0 * f(t, x) + 4.0 * f(t + h, x) - f(t + 2 * h, x)) / (2 * h);
            if (t + h > t_max) return (3.0 * f(t, x) - 4.0 * f(t - h, x) + f(t - 2 * h, x)) / (2 * h);
            return (f(t + h, x) - f(t - h, x)) / (2 * h);
        }
    }

    double dx(double t, double x) const {
        if constexpr (!std::is_same_v<Fx, std::nullptr_t>) {
            return fx(t, x);
        } else {
            const double h = step * std::max(1.0, std::abs(x));
            return (f(t, x + h) - f(t, x - h)) / (2 * h);
        }
    }
};

template <class F>
FunctionSurface<F> make_function_surface(F f, double t_min = -std::numeric_limits<double>::infinity(),
                                         double t_max = std::numeric_limits<double>::infinity()) {
    return FunctionSurface<F>{std::move(f), nullptr, nullptr, t_min, t_max};
}

template <class F, class Ft, class Fx>
FunctionSurface<F, Ft, Fx> make_function_surface(F f, Ft ft, Fx fx) {
    return FunctionSurface<F, Ft, Fx>{std::move(f), std::move(ft), std::move(fx)};
}

}  // namespace levyhedge
