#pragma once

#include <cstdint>
#include <vector>

#include "levyhedge/levy_model.hpp"
#include "levyhedge/stats.hpp"

namespace levyhedge {

/// P(tau > T | X_0 = u) by Monte Carlo on the same streams as batch_simulate,
/// so it equals 1 - batch default rate for a shared seed.
Estimate survival_probability(const LevyModel& model, double horizon, double u, std::size_t n_paths,
                              std::uint64_t seed, unsigned threads = 1);

/// E[F(X_t) 1{tau > t}] = F(u) for F(x) = 1 - lambda/(mu delta) exp((lambda/mu - delta) x).
struct IdentityReport {
    double t = 0.0;
    double survival = 0.0;           ///< P^(tau > t)
    double scaled_exp_moment = 0.0;  ///< lambda/(mu delta) E^[exp((lambda/mu - delta) X_t) 1{tau > t}]
    double lhs = 0.0;
    double rhs = 0.0;
    double discrepancy = 0.0;        ///< lhs - rhs
    double std_err = 0.0;
    bool flagged = false;            ///< |lhs - rhs| > 3 std_err
    bool vacuous = false;            ///< lambda = mu delta, where F == 0
    std::size_t n_paths = 0;
};

inline constexpr double vacuous_tolerance = 1e-12;

IdentityReport martingale_identity_check(const LevyModel& model, double t, std::size_t n_paths,
                                         std::uint64_t seed, unsigned threads = 1);

/// One report per time, each on its own independent set of paths.
std::vector<IdentityReport> identity_sweep(const LevyModel& model, const std::vector<double>& times,
                                           std::size_t n_paths, std::uint64_t seed, unsigned threads = 1);

/// E[1{tau <= t}] against E[int_0^{t ^ tau} nu((-inf, -X_s]) ds] on shared paths.
struct CompensatorReport {
    double t = 0.0;
    Estimate default_indicator;
    Estimate compensator;
    double difference = 0.0;
    double combined_std_err = 0.0;  ///< sqrt(se_a^2 + se_b^2), ignores the shared paths
    double paired_std_err = 0.0;    ///< s.e. of the per-path difference; used for the verdict
    bool within_3se = false;
};

CompensatorReport intensity_compensator_check(const LevyModel& model, double t, std::size_t n_paths,
                                              std::uint64_t seed, unsigned threads = 1);

}  // namespace levyhedge
