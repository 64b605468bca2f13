#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "levyhedge/hedging.hpp"
#include "levyhedge/stats.hpp"

using namespace levyhedge;

namespace {

LevyModel example_model() { return build_model(0.01, 0.1, 10.0, ExponentialNegative{100.0}); }

const ValueSurface& shared_surface() {
    static const ValueSurface s = [] {
        SurfaceOptions opt;
        opt.n_paths = 20000;
        opt.seed = 31;
        return estimate_surface(example_model(), Payoff::constant(1.0), 2.0, uniform_grid(0.0, 2.0, 21),
                                uniform_grid(0.0, 0.5, 41), opt);
    }();
    return s;
}

ValueSurface zero_surface() {
    ValueSurface s;
    s.t_grid = uniform_grid(0.0, 2.0, 3);
    s.x_grid = uniform_grid(0.0, 0.5, 3);
    s.values = Eigen::MatrixXd::Zero(3, 3);
    s.std_err = Eigen::MatrixXd::Zero(3, 3);
    s.payoff = Payoff::constant(0.0);
    s.horizon = 2.0;
    return s;
}

double variance(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST(Hedging, UniformDates) {
    const auto d = uniform_dates(2.0, 4);
    ASSERT_EQ(d.size(), 5);
    EXPECT_EQ(d(0), 0.0);
    EXPECT_EQ(d(2), 1.0);
    EXPECT_EQ(d(4), 2.0);
    EXPECT_THROW(uniform_dates(2.0, 0), ModelError);
}

TEST(Hedging, HandRolledThreeDates) {
    const auto m = example_model();
    const auto& s = shared_surface();
    const auto f = as_surface_fn(s);
    const auto path = make_path(0.01, 0.1, 2.0, {0.4, 1.3}, {-0.003, -0.02});
    Eigen::VectorXd dates(3);
    dates << 0.0, 1.0, 2.0;
    const auto rec = build_strategy(s, m, path, dates);

    const double x0 = 0.01;
    const double x1 = 0.01 + 0.1 - 0.003;
    const double x2 = 0.01 + 0.2 - 0.023;
    QuadSpec q;
    EXPECT_EQ(rec.x(0), x0);
    EXPECT_NEAR(rec.x(1), x1, 1e-15);
    EXPECT_NEAR(rec.x(2), x2, 1e-15);
    const double th0 = theta_exponential(f, 0.0, rec.x(0), m, q, false);
    const double th1 = theta_exponential(f, 1.0, rec.x(1), m, q, false);
    const double v0 = f.value(0.0, rec.x(0));
    const double v1 = f.value(1.0, rec.x(1));
    const double v2 = 1.0;
    EXPECT_NEAR(rec.theta(0), th0, 1e-12 * th0);
    EXPECT_NEAR(rec.theta(1), th1, 1e-12 * std::max(1.0, th1));
    EXPECT_EQ(rec.value(0), v0);
    EXPECT_EQ(rec.value(1), v1);
    EXPECT_EQ(rec.value(2), v2);
    const double s1 = th0 * (rec.x(1) - rec.x(0));
    const double s2 = s1 + th1 * (rec.x(2) - rec.x(1));
    EXPECT_NEAR(rec.stoch_int(2), s2, 1e-12);
    EXPECT_NEAR(rec.hedge_error(2), (v2 - s2) - v0, 1e-12);
    EXPECT_NEAR(rec.eta(0), v0 - th0 * x0, 1e-12);
    EXPECT_EQ(rec.payoff, 1.0);
}

TEST(Hedging, ZeroClaimGivesZeroStrategy) {
    const auto m = example_model();
    const auto s = zero_surface();
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto path = simulate_path(m, 2.0, {5, i});
        const auto rec = build_strategy(s, m, path, uniform_dates(2.0, 50));
        EXPECT_EQ(rec.theta.cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ(rec.eta.cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ(rec.hedge_error.cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Hedging, FlatAfterDefault) {
    const auto m = example_model();
    const auto path = make_path(0.01, 0.1, 2.0, {0.31}, {-0.5});
    const auto dates = uniform_dates(2.0, 100);
    const auto rec = build_strategy(shared_surface(), m, path, dates);
    for (Eigen::Index k = 0; k < rec.size(); ++k) {
        if (dates(k) >= 0.31) {
            EXPECT_EQ(rec.theta(k), 0.0);
            EXPECT_EQ(rec.value(k), 0.0);
            EXPECT_EQ(rec.eta(k), 0.0);
        } else {
            EXPECT_GT(rec.theta(k), 0.0);
        }
    }
    EXPECT_EQ(rec.payoff, 0.0);
    // Once flat the hedge error no longer moves.
    EXPECT_EQ(rec.hedge_error(100), rec.hedge_error(17));
}

TEST(Hedging, Predictability) {
    const auto m = example_model();
    const auto dates = uniform_dates(2.0, 20);
    const auto base = make_path(0.01, 0.1, 2.0, {0.25, 1.55}, {-0.004, -0.01});
    const auto bumped = make_path(0.01, 0.1, 2.0, {0.25, 0.95, 1.55}, {-0.004, -0.03, -0.01});
    const auto a = build_strategy(shared_surface(), m, base, dates);
    const auto b = build_strategy(shared_surface(), m, bumped, dates);
    // Extra jump in (0.9, 1.0]: positions up to t_9 = 0.9 are unchanged.
    for (Eigen::Index k = 0; k <= 9; ++k) {
        EXPECT_EQ(a.theta(k), b.theta(k));
        EXPECT_EQ(a.eta(k), b.eta(k));
    }
    EXPECT_NE(a.theta(10), b.theta(10));
}

TEST(Hedging, AccountingExact) {
    const auto m = example_model();
    const auto dates = uniform_dates(2.0, 1000);
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto rec = build_strategy(shared_surface(), m, simulate_path(m, 2.0, {77, i}), dates);
        EXPECT_TRUE(check_accounting(rec).exact()) << "path " << i;
    }
}

TEST(Hedging, TerminalMismatchRejected) {
    auto s = shared_surface();
    s.values(s.values.rows() - 1, 3) = 0.5;
    const auto m = example_model();
    EXPECT_THROW(build_strategy(s, m, make_path(0.01, 0.1, 2.0, {}, {}), uniform_dates(2.0, 10)), ModelError);
    EXPECT_THROW(build_strategy(shared_surface(), m, make_path(0.01, 0.1, 1.0, {}, {}), uniform_dates(1.0, 10)),
                 ModelError);
}

TEST(Hedging, ThetaMethodsAgreeAlongPath) {
    const auto m = example_model();
    const auto path = simulate_path(m, 2.0, {3, 3});
    const auto dates = uniform_dates(2.0, 40);
    const auto a = build_strategy(shared_surface(), m, path, dates, {}, ThetaMethod::general);
    const auto b = build_strategy(shared_surface(), m, path, dates, {}, ThetaMethod::exponential);
    for (Eigen::Index k = 0; k < a.size(); ++k)
        EXPECT_NEAR(a.theta(k), b.theta(k), 1e-6 * std::max(1.0, std::abs(b.theta(k))));
}

TEST(Hedging, HedgeRatioMinimizesVariance) {
    // Scaling theta by c changes L_T = V_T - V_0 - c S_T; c = 1 should beat 0 and 2.
    const auto m = example_model();
    const auto dates = uniform_dates(2.0, 200);
    const std::size_t n = 2000;
    std::vector<double> l0(n), l1(n), l2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto rec = build_strategy(shared_surface(), m, simulate_path(m, 2.0, {41, i}), dates);
        const double s = rec.stoch_int(rec.size() - 1);
        const double base = rec.value(rec.size() - 1) - rec.value(0);
        l0[i] = base;
        l1[i] = base - s;
        l2[i] = base - 2.0 * s;
    }
    EXPECT_LT(variance(l1), variance(l0));
    EXPECT_LT(variance(l1), variance(l2));
}

TEST(Hedging, VarianceNonIncreasingUnderRefinement) {
    const auto m = example_model();
    double previous = INFINITY;
    double previous_se = 0.0;
    for (Eigen::Index n_dates : {10, 40, 160}) {
        HedgeStatsOptions opt;
        opt.n_paths = 1500;
        opt.seed = 8;
        const auto st = hedge_error_stats(m, shared_surface(), uniform_dates(2.0, n_dates), opt);
        EXPECT_LE(st.var_L, previous + 3.0 * std::hypot(st.var_L_std_err, previous_se)) << n_dates;
        previous = st.var_L;
        previous_se = st.var_L_std_err;
    }
}

TEST(Hedging, StatsDeterministicAcrossThreads) {
    const auto m = example_model();
    HedgeStatsOptions opt;
    opt.n_paths = 300;
    opt.seed = 2;
    opt.threads = 1;
    const auto a = hedge_error_stats(m, shared_surface(), uniform_dates(2.0, 50), opt);
    opt.threads = 3;
    const auto b = hedge_error_stats(m, shared_surface(), uniform_dates(2.0, 50), opt);
    EXPECT_EQ(a.mean_L, b.mean_L);
    EXPECT_EQ(a.var_L, b.var_L);
    EXPECT_EQ(a.corr, b.corr);
    EXPECT_EQ(a.corr_std_err, b.corr_std_err);
    EXPECT_EQ(a.paths_with_accounting_errors, 0u);
}

TEST(Hedging, StatsRequireMartingale) {
    const auto m = build_model(0.01, 0.2, 10.0, ExponentialNegative{100.0});
    HedgeStatsOptions opt;
    opt.n_paths = 10;
    EXPECT_THROW(hedge_error_stats(m, shared_surface(), uniform_dates(2.0, 10), opt), ModelError);
}

TEST(RiskFree, ZeroClaimIsRiskFree) {
    const auto m = example_model();
    const auto r = risk_free_check(ConstantSurface{0.0}, m, QuadSpec{}, uniform_grid(0.0, 2.0, 5),
                                   uniform_grid(0.01, 0.4, 5), 1e-6);
    EXPECT_TRUE(r.risk_free);
    EXPECT_EQ(r.sup, 0.0);
}

TEST(RiskFree, BondIsNotRiskFree) {
    const auto m = example_model();
    const auto r = risk_free_check(as_surface_fn(shared_surface()), m, QuadSpec{}, uniform_grid(0.0, 1.9, 5),
                                   uniform_grid(0.01, 0.4, 5), 1e-6);
    EXPECT_FALSE(r.risk_free);
    EXPECT_GT(r.sup, 1e-6);
    EXPECT_LE(r.rms, r.sup);
}

TEST(RiskFree, VerdictMonotoneInTolerance) {
    const auto m = example_model();
    const auto t = uniform_grid(0.0, 1.0, 3);
    const auto x = uniform_grid(0.02, 0.3, 4);
    bool seen_true = false;
    for (double tol : {1e-8, 1e-4, 1e-1, 1.0, 10.0, 1e3, 1e5}) {
        const auto r = risk_free_check(ConstantSurface{1.0}, m, QuadSpec{}, t, x, tol);
        if (seen_true) EXPECT_TRUE(r.risk_free) << tol;
        seen_true = seen_true || r.risk_free;
    }
    EXPECT_TRUE(seen_true);
}
