#include <gtest/gtest.h>

#include <cmath>

#include "levyhedge/operators.hpp"
#include "levyhedge/path_sim.hpp"
#include "levyhedge/stats.hpp"
#include "levyhedge/value_surface.hpp"

using namespace levyhedge;

namespace {

constexpr double lam = 10.0;
constexpr double del = 100.0;

LevyModel example_model() { return build_model(0.01, 0.1, lam, ExponentialNegative{del}); }

ValueSurface small_surface(std::size_t n_paths, std::uint64_t seed = 1, unsigned threads = 1) {
    SurfaceOptions opt;
    opt.n_paths = n_paths;
    opt.seed = seed;
    opt.threads = threads;
    return estimate_surface(example_model(), Payoff::constant(1.0), 2.0, uniform_grid(0.0, 2.0, 9),
                            uniform_grid(0.0, 0.2, 11), opt);
}

ValueSurface constant_surface(double c) {
    ValueSurface s;
    s.t_grid = uniform_grid(0.0, 2.0, 5);
    s.x_grid = uniform_grid(0.0, 0.5, 6);
    s.values = Eigen::MatrixXd::Constant(5, 6, c);
    s.std_err = Eigen::MatrixXd::Zero(5, 6);
    s.payoff = Payoff::constant(c);
    s.horizon = 2.0;
    return s;
}

}  // namespace

TEST(ValueSurface, DefaultGridExtent) {
    const auto m = example_model();
    EXPECT_NEAR(default_x_max(m, 2.0), 0.01 + 0.2 + 5.0 * std::sqrt(0.002 * 2.0), 1e-15);
}

TEST(ValueSurface, TerminalRowExact) {
    const auto s = small_surface(2000);
    EXPECT_EQ(boundary_error(s), 0.0);
    for (Eigen::Index j = 0; j < s.x_grid.size(); ++j) EXPECT_EQ(s.values(s.values.rows() - 1, j), 1.0);
}

TEST(ValueSurface, RangeAndMonotoneInX) {
    const auto s = small_surface(5000);
    EXPECT_GE(s.values.minCoeff(), 0.0);
    EXPECT_LE(s.values.maxCoeff(), 1.0);
    // Shared paths per row make the indicator estimate monotone node by node.
    for (Eigen::Index i = 0; i < s.values.rows(); ++i)
        for (Eigen::Index j = 1; j < s.values.cols(); ++j) EXPECT_GE(s.values(i, j), s.values(i, j - 1));
}

TEST(ValueSurface, IncreasingInTimeWithinNoise) {
    const auto s = small_surface(20000);
    for (Eigen::Index j = 0; j < s.values.cols(); ++j)
        for (Eigen::Index i = 1; i < s.values.rows(); ++i)
            EXPECT_GE(s.values(i, j) + 3.0 * std::hypot(s.std_err(i, j), s.std_err(i - 1, j)), s.values(i - 1, j));
}

TEST(ValueSurface, OriginNodeMatchesSurvivalRate) {
    SurfaceOptions opt;
    opt.n_paths = 100000;
    opt.seed = 77;
    const auto m = example_model();
    Eigen::VectorXd xg(3);
    xg << 0.0, 0.01, 0.1;
    const auto s = estimate_surface(m, Payoff::constant(1.0), 2.0, uniform_grid(0.0, 2.0, 2), xg, opt);
    EXPECT_NEAR(s.values(0, 1), 1.0 - 0.754995, 3.0 * s.std_err(0, 1));
}

TEST(ValueSurface, ThreadCountDoesNotChangeResult) {
    const auto a = small_surface(3000, 5, 1);
    const auto b = small_surface(3000, 5, 4);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.std_err, b.std_err);
}

TEST(ValueSurface, StdErrScalesWithPathCount) {
    const auto a = small_surface(20000, 9);
    const auto b = small_surface(40000, 9);
    const double ratio = b.std_err(0, 3) / a.std_err(0, 3);
    EXPECT_NEAR(ratio, 1.0 / std::sqrt(2.0), 0.2 / std::sqrt(2.0));
}

TEST(ValueSurface, NonMartingaleNeedsAcknowledgement) {
    const auto m = build_model(0.01, 0.2, 10.0, ExponentialNegative{100.0});
    SurfaceOptions opt;
    opt.n_paths = 100;
    EXPECT_THROW(estimate_surface(m, Payoff::constant(1.0), 1.0, opt), ModelError);
    opt.nonmartingale_ack = true;
    EXPECT_NO_THROW(estimate_surface(m, Payoff::constant(1.0), 1.0, uniform_grid(0.0, 1.0, 3),
                                     uniform_grid(0.0, 0.1, 3), opt));
}

TEST(ValueSurface, GridMustEndAtHorizon) {
    SurfaceOptions opt;
    opt.n_paths = 100;
    EXPECT_THROW(estimate_surface(example_model(), Payoff::constant(1.0), 2.0, uniform_grid(0.0, 1.5, 4),
                                  uniform_grid(0.0, 0.1, 3), opt),
                 ModelError);
}

TEST(GridSurface, NodesExactAndMidpointsAveraged) {
    ValueSurface s = constant_surface(0.0);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 6; ++j) s.values(i, j) = std::sin(1.0 + i + 2.0 * j);
    const auto g = as_surface_fn(s);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 6; ++j) EXPECT_EQ(g.value(s.t_grid(i), s.x_grid(j)), s.values(i, j));
    const double tm = 0.5 * (s.t_grid(1) + s.t_grid(2));
    const double xm = 0.5 * (s.x_grid(3) + s.x_grid(4));
    const double avg = 0.25 * (s.values(1, 3) + s.values(1, 4) + s.values(2, 3) + s.values(2, 4));
    EXPECT_NEAR(g.value(tm, xm), avg, 1e-15);
}

TEST(GridSurface, ZeroBelowBoundaryAndConstantBeyond) {
    const auto g = as_surface_fn(constant_surface(0.7));
    EXPECT_EQ(g.value(1.0, -1e-12), 0.0);
    EXPECT_EQ(g.value(1.0, 5.0), 0.7);
    EXPECT_EQ(g.value(-1.0, 0.1), 0.7);
    EXPECT_EQ(g.dx(1.0, 5.0), 0.0);
}

TEST(GridSurface, DerivativesExactForQuadratics) {
    ValueSurface s = constant_surface(0.0);
    s.x_grid << 0.0, 0.05, 0.15, 0.2, 0.35, 0.5;
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 6; ++j) {
            const double t = s.t_grid(i);
            const double x = s.x_grid(j);
            s.values(i, j) = t * t + 3.0 * x * x - x;
        }
    const auto g = as_surface_fn(s);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 6; ++j) {
            EXPECT_NEAR(g.dt(s.t_grid(i), s.x_grid(j)), 2.0 * s.t_grid(i), 1e-12);
            EXPECT_NEAR(g.dx(s.t_grid(i), s.x_grid(j)), 6.0 * s.x_grid(j) - 1.0, 1e-12);
        }
}

TEST(GridSurface, ClosedFormJumpIntegralMatchesAdaptive) {
    const auto s = small_surface(5000, 3);
    const auto g = as_surface_fn(s);
    const auto m = example_model();
    QuadSpec closed;
    QuadSpec adaptive;
    adaptive.method = QuadMethod::adaptive;
    for (double x : {0.003, 0.01, 0.055, 0.13, 0.2}) {
        const double a = apply_A(g, 0.7, x, m, closed);
        const double b = apply_A(g, 0.7, x, m, adaptive);
        EXPECT_NEAR(a, b, 1e-8 * std::max(1.0, std::abs(b))) << "x=" << x;
        const double ta = theta_general(g, 0.7, x, m, closed, false);
        const double tb = theta_exponential(g, 0.7, x, m, closed, false);
        EXPECT_NEAR(ta, tb, 1e-6 * std::max(1.0, std::abs(tb))) << "x=" << x;
    }
}

TEST(PideResidual, ConstantSurfaceResidualIsKilling) {
    const auto s = constant_surface(1.0);
    const auto r = pide_residual(s, example_model(), QuadSpec{});
    for (Eigen::Index i = 0; i < 5; ++i) {
        EXPECT_TRUE(std::isnan(r.residual(i, 0)));
        for (Eigen::Index j = 1; j < 6; ++j)
            EXPECT_NEAR(r.residual(i, j), -lam * std::exp(-del * s.x_grid(j)), 1e-12);
    }
}

TEST(PideResidual, EstimatedSurfaceWithinNoise) {
    const auto s = small_surface(20000, 11);
    const auto r = pide_residual(s, example_model(), QuadSpec{});
    EXPECT_GE(r.interior_fraction_within(5.0), 0.95);
}

TEST(PideResidual, RequiresMartingaleModel) {
    const auto m = build_model(0.01, 0.2, 10.0, ExponentialNegative{100.0});
    EXPECT_THROW(pide_residual(constant_surface(1.0), m, QuadSpec{}), ModelError);
}

TEST(ValueSurface, MartingaleOfZShortCheck) {
    // E[f(t, X_t) 1{tau > t}] should not drift in t.
    const auto m = example_model();
    SurfaceOptions opt;
    opt.n_paths = 20000;
    opt.seed = 4;
    const auto s = estimate_surface(m, Payoff::constant(1.0), 2.0, opt);
    const auto g = as_surface_fn(s);
    const std::size_t n = 20000;
    for (double t : {0.5, 1.0}) {
        std::vector<double> z(n);
        for (std::size_t k = 0; k < n; ++k) {
            const auto p = simulate_path(m, 2.0, {123, k});
            z[k] = p.defaulted_by(t) ? 0.0 : g.value(t, sample_at(p, t));
        }
        const auto e = mean_estimate(z);
        const double se = std::sqrt(e.std_err * e.std_err + 2.0 * std::pow(s.std_err.maxCoeff(), 2));
        EXPECT_NEAR(e.mean, g.value(0.0, 0.01), 3.0 * se) << "t=" << t;
    }
}
