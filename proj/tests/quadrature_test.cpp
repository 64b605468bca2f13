#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "levyhedge/quadrature.hpp"
#include "levyhedge/surface_fn.hpp"

using namespace levyhedge;

TEST(Quadrature, PolynomialsExact) {
    QuadSpec q;
    const auto r = integrate([](double x) { return 3 * x * x * x - x + 2; }, -1.0, 2.0, q);
    EXPECT_NEAR(r.value, 3.0 * (16.0 - 1.0) / 4.0 - (4.0 - 1.0) / 2.0 + 6.0, 1e-13);
}

TEST(Quadrature, SmoothTranscendental) {
    QuadSpec q;
    EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, q).value, 2.0, 1e-12);
    EXPECT_NEAR(integrate([](double x) { return std::exp(-x); }, 0.0, 30.0, q).value, -std::expm1(-30.0), 1e-12);
}

TEST(Quadrature, KinkHandledByBreak) {
    QuadSpec q;
    const double breaks[] = {0.3};
    const auto r = integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, q, breaks);
    EXPECT_NEAR(r.value, 0.5 * (0.09 + 0.49), 1e-14);
}

TEST(Quadrature, SingularIntegrandRaises) {
    QuadSpec q;
    q.max_subdivisions = 5;
    EXPECT_THROW(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, q), ConvergenceError);
}

TEST(Quadrature, ConvergenceErrorCarriesEstimate) {
    QuadSpec q;
    q.max_subdivisions = 2;
    try {
        integrate([](double x) { return std::sin(1.0 / x); }, 1e-4, 1.0, q);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_TRUE(std::isfinite(e.estimate()));
        EXPECT_GT(e.error_bound(), 0.0);
    }
}

TEST(Quadrature, EmptyInterval) {
    QuadSpec q;
    EXPECT_EQ(integrate([](double) { return 1.0; }, 1.0, 1.0, q).value, 0.0);
}

TEST(Quadrature, Simpson) {
    EXPECT_NEAR(simpson([](double x) { return x * x * x; }, 0.0, 2.0, 2), 4.0, 1e-14);
    EXPECT_NEAR(simpson([](double x) { return std::cos(x); }, 0.0, 1.0, 200), std::sin(1.0), 1e-10);
}

TEST(Quadrature, SpecValidation) {
    QuadSpec q;
    q.tail_cut = 0.1;
    EXPECT_THROW(q.validate(), ModelError);
    q = {};
    q.panels = 0;
    EXPECT_THROW(q.validate(), ModelError);
}

TEST(PolyIntegrals, DecayMomentsMatchAdaptive) {
    QuadSpec q;
    for (double w : {1e-4, 0.003, 0.01, 0.02, 0.5}) {
        for (double delta : {10.0, 100.0}) {
            const auto g = poly::decay_moments(w, delta, 4);
            for (int k = 0; k <= 4; ++k) {
                const auto r = integrate(
                    [&](double r) { return std::pow(r, k) * delta * std::exp(-delta * r); }, 0.0, w, q);
                EXPECT_NEAR(g[k], r.value, 1e-13 * std::max(1.0, std::abs(r.value)))
                    << "w=" << w << " delta=" << delta << " k=" << k;
            }
        }
    }
}

TEST(PolyIntegrals, ReflectAtPreservesValues) {
    PolyPiece p{0.2, 0.7, {1.0, -2.0, 0.5, 3.0, -1.0}, 4};
    const auto q = poly::reflect_at(p, 0.7);
    for (double z : {0.2, 0.33, 0.5, 0.7}) {
        const double r = 0.7 - z;
        double v = 0.0;
        for (int k = 4; k >= 0; --k) v = v * r + q[k];
        EXPECT_NEAR(v, p(z), 1e-13);
    }
}

TEST(PolyIntegrals, ExpWeightedIntegralMatchesAdaptive) {
    PiecewisePoly g{
        {0.0, 0.05, {0.1, 2.0, -3.0, 0.0, 0.0}, 2},
        {0.05, 0.12, {0.2925, 1.5, 4.0, -7.0, 0.0}, 3},
        {0.12, std::numeric_limits<double>::infinity(), {0.9, 0.0, 0.0, 0.0, 0.0}, 0},
    };
    auto eval = [&](double z) {
        for (const auto& p : g)
            if (z >= p.lo && z < p.hi) return p(z);
        return 0.0;
    };
    QuadSpec q;
    const double breaks[] = {0.05, 0.12};
    for (double x : {0.01, 0.05, 0.08, 0.2, 0.4}) {
        for (double delta : {20.0, 100.0}) {
            const double closed = poly::exp_weighted_integral(g, 0.0, x, delta, x);
            const auto adaptive =
                integrate([&](double z) { return eval(z) * delta * std::exp(delta * (z - x)); }, 0.0, x, q, breaks);
            EXPECT_NEAR(closed, adaptive.value, 1e-12) << "x=" << x << " delta=" << delta;
        }
    }
}

TEST(PolyIntegrals, ProductAndShift) {
    PolyPiece a{0.1, 0.4, {1.0, 2.0, 0.0, 0.0, 0.0}, 1};
    PolyPiece b{0.1, 0.4, {0.5, -1.0, 3.0, 0.0, 0.0}, 2};
    const auto ab = poly::product(a, b);
    const auto xa = poly::times_shifted_z(a, 0.0);
    for (double z : {0.1, 0.25, 0.4}) {
        EXPECT_NEAR(ab(z), a(z) * b(z), 1e-14);
        EXPECT_NEAR(xa(z), z * a(z), 1e-14);
    }
}
