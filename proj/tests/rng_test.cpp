#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "levyhedge/rng.hpp"
#include "levyhedge/stats.hpp"

using namespace levyhedge;

TEST(Rng, SameStreamSameSequence) {
    Xoshiro256 a(RngStream{7, 3});
    Xoshiro256 b(RngStream{7, 3});
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, NeighbouringStreamsDiffer) {
    Xoshiro256 a(RngStream{7, 3});
    Xoshiro256 b(RngStream{7, 4});
    Xoshiro256 c(RngStream{8, 3});
    int same_ab = 0;
    int same_ac = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a();
        same_ab += x == b();
        same_ac += x == c();
    }
    EXPECT_EQ(same_ab, 0);
    EXPECT_EQ(same_ac, 0);
}

TEST(Rng, KnownFirstOutputIsStable) {
    // Pinned so that any change to seeding or the generator is noticed.
    Xoshiro256 a(RngStream{0, 0});
    const auto first = a();
    Xoshiro256 b(RngStream{0, 0});
    EXPECT_EQ(first, b());
    EXPECT_EQ(splitmix64_mix(0), 0xE220A8397B1DCDAFULL);
}

TEST(Rng, UniformOpenInterval) {
    Xoshiro256 g(RngStream{1, 1});
    double lo = 1.0;
    double hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = g.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    EXPECT_LT(lo, 1e-3);
    EXPECT_GT(hi, 1.0 - 1e-3);
}

TEST(Rng, ExponentialMean) {
    Xoshiro256 g(RngStream{2, 9});
    std::vector<double> v(200000);
    for (auto& x : v) x = g.exponential(4.0);
    const auto e = mean_estimate(v);
    EXPECT_NEAR(e.mean, 0.25, 4.0 * e.std_err);
}

TEST(Rng, DomainSeeds) {
    EXPECT_EQ(domain_seed(123, StreamDomain::paths), 123u);
    EXPECT_NE(domain_seed(123, StreamDomain::surface), domain_seed(123, StreamDomain::hedge));
    EXPECT_NE(domain_seed(123, StreamDomain::surface), 123u);
}

TEST(Stats, PairwiseSumOrderFixed) {
    std::vector<double> v(10000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / static_cast<double>(i + 1);
    EXPECT_EQ(pairwise_sum(v), pairwise_sum(v));
    double naive = 0.0;
    for (double x : v) naive += x;
    EXPECT_NEAR(pairwise_sum(v), naive, 1e-12);
}

TEST(Stats, MeanEstimate) {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto e = mean_estimate(v);
    EXPECT_DOUBLE_EQ(e.mean, 2.5);
    EXPECT_NEAR(e.std_err, std::sqrt((1.25 * 4.0 / 3.0) / 4.0), 1e-15);
    EXPECT_DOUBLE_EQ(combined_std_err(3.0, 4.0), 5.0);
}
