#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace levyhedge {

/// Pairwise summation; the result depends only on the order of `values`.
inline double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t block = 64;
    if (values.size() <= block) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

struct Estimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::size_t n = 0;
};

/// Sample mean and standard error of the mean.
inline Estimate mean_estimate(std::span<const double> values) {
    Estimate e;
    e.n = values.size();
    if (e.n == 0) return e;
    e.mean = pairwise_sum(values) / static_cast<double>(e.n);
    if (e.n < 2) return e;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - e.mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(e.n - 1);
    e.std_err = std::sqrt(var / static_cast<double>(e.n));
    return e;
}

inline double combined_std_err(double a, double b) { return std::hypot(a, b); }

}  // namespace levyhedge
