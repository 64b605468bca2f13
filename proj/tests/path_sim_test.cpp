#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "levyhedge/errors.hpp"
#include "levyhedge/path_sim.hpp"
#include "levyhedge/stats.hpp"

using namespace levyhedge;

namespace {

LevyModel example_model() { return build_model(0.01, 0.1, 10.0, ExponentialNegative{100.0}); }

}  // namespace

TEST(PathSim, NoJumpPathIsAffine) {
    const auto p = make_path(0.01, 0.1, 2.0, {}, {});
    EXPECT_FALSE(p.tau.has_value());
    EXPECT_DOUBLE_EQ(sample_at(p, 0.0), 0.01);
    EXPECT_NEAR(sample_at(p, 2.0), 0.21, 1e-15);
    EXPECT_NEAR(sample_at(p, 1.3), 0.01 + 0.13, 1e-15);
}

TEST(PathSim, ForcedJumpDefaults) {
    const auto p = make_path(0.01, 0.1, 2.0, {0.5}, {-1.0});
    EXPECT_NEAR(left_limit_at(p, 0.5), 0.06, 1e-15);
    EXPECT_NEAR(sample_at(p, 0.5), -0.94, 1e-15);
    ASSERT_TRUE(p.tau.has_value());
    EXPECT_DOUBLE_EQ(*p.tau, 0.5);
    EXPECT_TRUE(p.defaulted_by(0.5));
    EXPECT_FALSE(p.defaulted_by(0.49));
}

TEST(PathSim, LandingExactlyOnZeroIsNotDefault) {
    // 0.5 + 0.5 * 1 - 1 is exactly 0 in binary floating point.
    const auto p = make_path(0.5, 0.5, 2.0, {1.0}, {-1.0});
    EXPECT_EQ(sample_at(p, 1.0), 0.0);
    EXPECT_FALSE(p.tau.has_value());
    const auto q = make_path(0.5, 0.5, 2.0, {1.0}, {std::nextafter(-1.0, -2.0)});
    EXPECT_TRUE(q.tau.has_value());
}

TEST(PathSim, CadlagTwoJumps) {
    const auto p = make_path(1.0, 0.5, 3.0, {1.0, 2.0}, {-0.25, 0.5});
    EXPECT_DOUBLE_EQ(left_limit_at(p, 1.0), 1.5);
    EXPECT_DOUBLE_EQ(sample_at(p, 1.0), 1.25);
    EXPECT_DOUBLE_EQ(left_limit_at(p, 2.0), 1.75);
    EXPECT_DOUBLE_EQ(sample_at(p, 2.0), 2.25);
    EXPECT_DOUBLE_EQ(sample_at(p, 3.0), 2.75);
    EXPECT_DOUBLE_EQ(sample_at(p, 1.5), left_limit_at(p, 1.5));
    EXPECT_DOUBLE_EQ(p.level_before(1), 1.75);
}

TEST(PathSim, DefaultIndexFindsFirstNegative) {
    const std::vector<double> levels{0.3, 0.0, 0.2, -0.1, -0.5};
    EXPECT_EQ(default_index(levels), std::optional<std::size_t>{3});
    const std::vector<double> safe{0.3, 0.0};
    EXPECT_FALSE(default_index(safe).has_value());
}

TEST(PathSim, SampleOutsideHorizonThrows) {
    const auto p = make_path(0.01, 0.1, 2.0, {}, {});
    EXPECT_THROW(sample_at(p, -0.1), ModelError);
    EXPECT_THROW(sample_at(p, 2.1), ModelError);
}

TEST(PathSim, MakePathValidatesEvents) {
    EXPECT_THROW(make_path(0.01, 0.1, 2.0, {0.5, 0.4}, {-0.1, -0.1}), ModelError);
    EXPECT_THROW(make_path(0.01, 0.1, 2.0, {0.5}, {}), ModelError);
    EXPECT_THROW(make_path(0.01, 0.1, 2.0, {2.5}, {-0.1}), ModelError);
}

TEST(PathSim, SimulatedPathConsistency) {
    const auto m = example_model();
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto p = simulate_path(m, 2.0, {11, i});
        double prev = 0.0;
        for (std::size_t j = 0; j < p.jump_count(); ++j) {
            ASSERT_GT(p.jump_times[j], prev);
            ASSERT_LE(p.jump_times[j], 2.0);
            ASSERT_LT(p.jump_sizes[j], 0.0);
            prev = p.jump_times[j];
            const double expected = m.u() + m.mu() * p.jump_times[j];
            double sum = 0.0;
            for (std::size_t k = 0; k <= j; ++k) sum += p.jump_sizes[k];
            ASSERT_NEAR(p.levels[j], expected + sum, 1e-12);
        }
        if (p.tau) {
            ASSERT_LT(sample_at(p, *p.tau), 0.0);
            ASSERT_GT(left_limit_at(p, *p.tau), 0.0);
        }
    }
}

TEST(PathSim, SinglePathBatchMatchesStreamZero) {
    const auto m = example_model();
    const auto b = batch_simulate(m, 2.0, 1, 99, 1, 1);
    const auto p = simulate_path(m, 2.0, {99, 0});
    ASSERT_EQ(b.retained.size(), 1u);
    EXPECT_EQ(b.retained[0].jump_times, p.jump_times);
    EXPECT_EQ(b.retained[0].jump_sizes, p.jump_sizes);
    EXPECT_EQ(b.n_defaults, p.tau ? 1u : 0u);
}

TEST(PathSim, BatchIndependentOfThreadCount) {
    const auto m = example_model();
    const auto a = batch_simulate(m, 2.0, 20000, 5, 1, 3);
    const auto b = batch_simulate(m, 2.0, 20000, 5, 8, 3);
    EXPECT_EQ(a.n_defaults, b.n_defaults);
    EXPECT_EQ(a.default_rate, b.default_rate);
    ASSERT_EQ(a.retained.size(), b.retained.size());
    for (std::size_t i = 0; i < a.retained.size(); ++i) EXPECT_EQ(a.retained[i].levels, b.retained[i].levels);
}

TEST(PathSim, BatchReproducible) {
    const auto m = example_model();
    EXPECT_EQ(batch_simulate(m, 2.0, 5000, 17).n_defaults, batch_simulate(m, 2.0, 5000, 17).n_defaults);
}

TEST(PathSim, NoCreepInBatch) {
    const auto b = batch_simulate(example_model(), 2.0, 50000, 3, 2);
    EXPECT_EQ(b.creep_violations, 0u);
}

TEST(PathSim, ReferenceDefaultRate) {
    const auto b = batch_simulate(example_model(), 2.0, 200000, 20240601, 4);
    EXPECT_NEAR(b.default_rate, 0.754995, 3.0 * b.std_err);
}

TEST(PathSim, MartingaleMeanOfX) {
    const auto m = example_model();
    std::vector<double> xs(100000);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = sample_at(simulate_path(m, 1.0, {8, i}), 1.0);
    const auto e = mean_estimate(xs);
    EXPECT_NEAR(e.mean, m.u(), 4.0 * e.std_err);
}

TEST(PathSim, JumpCountIsPoisson) {
    const auto m = example_model();
    std::vector<double> counts(50000);
    for (std::size_t i = 0; i < counts.size(); ++i)
        counts[i] = static_cast<double>(simulate_path(m, 2.0, {4, i}).jump_count());
    const auto e = mean_estimate(counts);
    EXPECT_NEAR(e.mean, 20.0, 4.0 * e.std_err);
}

TEST(PathSim, CompensatorClosedFormOnAffineSegment) {
    // No jumps: int_0^t lambda exp(-delta (u + mu s)) ds.
    const auto m = example_model();
    const auto p = make_path(0.01, 0.1, 2.0, {}, {});
    const double t = 1.5;
    const double expected = 10.0 * std::exp(-1.0) * (1.0 - std::exp(-100.0 * 0.1 * t)) / (100.0 * 0.1);
    EXPECT_NEAR(compensator_integral(m, p, t), expected, 1e-13);
}

TEST(PathSim, CompensatorStopsAtDefault) {
    const auto m = example_model();
    const auto p = make_path(0.01, 0.1, 2.0, {0.5}, {-1.0});
    EXPECT_DOUBLE_EQ(compensator_integral(m, p, 2.0), compensator_integral(m, p, 0.5));
}
