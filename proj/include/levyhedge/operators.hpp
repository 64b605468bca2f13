#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "levyhedge/errors.hpp"
#include "levyhedge/levy_model.hpp"
#include "levyhedge/quadrature.hpp"
#include "levyhedge/surface_fn.hpp"

namespace levyhedge {

struct JumpIntegral {
    double value = 0.0;
    double error = 0.0;
};

/// Terms of A f(t, x) = f_t + mu f_x + jump - killing, where
///   jump    = int_{y > -x} (f(t, x+y) - f(t, x)) nu(dy)
///   killing = f(t, x) nu((-inf, -x]).
/// This equals the defining expression with the two integrals over (-inf, -x]
/// merged, and does not lose digits when nu((-inf, -x]) is tiny.
struct AResult {
    double value = 0.0;
    double error = 0.0;
    double time_term = 0.0;
    double drift_term = 0.0;
    double jump = 0.0;
    double killing = 0.0;
};

struct ThetaCheck {
    bool performed = false;
    double theta_a = 0.0;  ///< A f / beta
    double rel_diff = 0.0;
    bool diverged = false;
};

namespace detail {

/// int_{y > -x} w(y) (f(t, x+y) - f(t, x)) nu(dy), with w(y) = y if
/// `weight_y`, else 1.
template <SurfaceFn S>
JumpIntegral jump_term(const S& f, double t, double x, const LevyModel& model, const QuadSpec& quad,
                       bool weight_y) {
    const double fx = f.value(t, x);
    const double lambda = model.lambda();
    if (lambda == 0.0) return {};

    if (const auto* expo = model.exponential()) {
        const double delta = expo->rate;
        // Closed form over all of (0, x): no truncation needed.
        if constexpr (XSliceable<S>) {
            if (quad.method == QuadMethod::automatic) {
                auto slice = f.x_slice(t);
                for (auto& p : slice) {
                    p = poly::minus_constant(p, fx);
                    if (weight_y) p = poly::times_shifted_z(p, x);
                }
                return {lambda * poly::exp_weighted_integral(slice, 0.0, x, delta, x), 0.0};
            }
        }

        // Below z_lo the jump law carries mass tail_cut only.
        const double z_lo = std::max(0.0, x + std::log(quad.tail_cut) / delta);
        if (!(x > z_lo)) return {};

        std::vector<double> breaks;
        if constexpr (XSliceable<S>) {
            for (const auto& p : f.x_slice(t)) breaks.push_back(p.lo);
        }
        auto integrand = [&](double z) {
            const double w = weight_y ? z - x : 1.0;
            return w * (f.value(t, z) - fx) * delta * std::exp(delta * (z - x));
        };
        const auto r = integrate(integrand, z_lo, x, quad, breaks);
        return {lambda * r.value, lambda * r.error};
    }

    return std::visit(
        [&](const auto& law) -> JumpIntegral {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, EmpiricalJumps>) {
                double sum = 0.0;
                for (double y : law.samples) {
                    if (!(y > -x)) continue;
                    sum += (weight_y ? y : 1.0) * (f.value(t, x + y) - fx);
                }
                return {lambda * sum / static_cast<double>(law.samples.size()), 0.0};
            } else if constexpr (std::is_same_v<T, UserDensity>) {
                const double lo = std::max(law.lower, -x);
                if (!(law.upper > lo)) return {};
                auto integrand = [&](double y) {
                    return (weight_y ? y : 1.0) * (f.value(t, x + y) - fx) * law.density(y);
                };
                const double breaks[] = {0.0};
                const auto r = integrate(integrand, lo, law.upper, quad, breaks);
                return {lambda * r.value, lambda * r.error};
            } else {
                return {};
            }
        },
        model.jump_law());
}

}  // namespace detail

/// int_{y > -x} (f(t, x+y) - f(t, x)) nu(dy).
template <SurfaceFn S>
JumpIntegral local_jump_integral(const S& f, double t, double x, const LevyModel& model, const QuadSpec& quad) {
    return detail::jump_term(f, t, x, model, quad, false);
}

template <SurfaceFn S>
AResult apply_A_detailed(const S& f, double t, double x, const LevyModel& model, const QuadSpec& quad) {
    if (!(x > 0.0)) throw ModelError("operator A is defined for x > 0 only");
    const auto jump = local_jump_integral(f, t, x, model, quad);
    AResult r;
    r.time_term = f.dt(t, x);
    r.drift_term = model.mu() * f.dx(t, x);
    r.jump = jump.value;
    r.killing = f.value(t, x) * model.tail_mass(x);
    r.error = jump.error;
    r.value = r.time_term + r.drift_term + r.jump - r.killing;
    return r;
}

template <SurfaceFn S>
double apply_A(const S& f, double t, double x, const LevyModel& model, const QuadSpec& quad) {
    return apply_A_detailed(f, t, x, model, quad).value;
}

/// K f = A K - x A f - beta f with K(t, x) = x f(t, x).
template <SurfaceFn S>
double apply_K_op(const S& f, double t, double x, const LevyModel& model, const QuadSpec& quad) {
    const TimesX<S> k{f};
    return apply_A(k, t, x, model, quad) - x * apply_A(f, t, x, model, quad) - model.beta() * f.value(t, x);
}

/// L f = A f^2 - 2 beta f - (K f)^2 / m2.
template <SurfaceFn S>
double apply_L(const S& f, double t, double x, const LevyModel& model, const QuadSpec& quad) {
    const Squared<S> f2{f};
    const double k = apply_K_op(f, t, x, model, quad);
    return apply_A(f2, t, x, model, quad) - 2.0 * model.beta() * f.value(t, x) - k * k / model.second_moment();
}

/// theta = K f(t, x_left) / m2, zero once defaulted. When beta != 0 the value
/// is compared with A f / beta and the outcome stored in `check`.
template <SurfaceFn S>
double theta_general(const S& f, double t, double x_left, const LevyModel& model, const QuadSpec& quad,
                     bool defaulted, ThetaCheck* check = nullptr) {
    if (defaulted) return 0.0;
    const double theta = apply_K_op(f, t, x_left, model, quad) / model.second_moment();
    if (check) {
        *check = {};
        if (!model.is_martingale()) {
            check->performed = true;
            check->theta_a = apply_A(f, t, x_left, model, quad) / model.beta();
            const double scale = std::max(std::abs(theta), std::abs(check->theta_a));
            check->rel_diff = scale > 0.0 ? std::abs(theta - check->theta_a) / scale : 0.0;
            check->diverged = check->rel_diff > quad.rel_tol;
        }
    }
    return theta;
}

/// Hedge ratio for exponential jumps in the martingale case:
///   theta = (delta^2 / 2) int_{-x}^0 y f(t, x+y) delta e^{delta y} dy + (delta / 2) f(t, x),
/// evaluated as
///   (delta^2 / 2) [int y (f(t, x+y) - f(t, x)) delta e^{delta y} dy + f(t, x) e^{-delta x} (x + 1/delta)].
template <SurfaceFn S>
double theta_exponential(const S& f, double t, double x_left, const LevyModel& model, const QuadSpec& quad,
                         bool defaulted) {
    const auto* expo = model.exponential();
    if (!expo) throw ModelError("theta_exponential needs an exponential jump law");
    if (!model.is_martingale()) throw ModelError("theta_exponential needs the martingale case lambda = mu delta");
    if (defaulted) return 0.0;
    if (!(x_left > 0.0)) throw ModelError("theta needs x > 0");
    const double delta = expo->rate;
    const double fx = f.value(t, x_left);
    // jump_term carries the factor lambda; strip it.
    const double local = detail::jump_term(f, t, x_left, model, quad, true).value / model.lambda();
    const double closed = fx * std::exp(-delta * x_left) * (x_left + 1.0 / delta);
    return 0.5 * delta * delta * (local + closed);
}

}  // namespace levyhedge
