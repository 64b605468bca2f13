#pragma once

#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "levyhedge/rng.hpp"

namespace levyhedge {

/// Y = -E with E ~ Exponential(rate): density rate * exp(rate * y) on y < 0.
struct ExponentialNegative {
    double rate = 1.0;
};

/// Empirical jump law. Atoms violate the continuity assumption on the Lévy
/// measure, so models built from it are flagged non-conforming.
struct EmpiricalJumps {
    std::vector<double> samples;  // sorted on construction of the model
};

/// Jump density on a finite support [lower, upper]. Must integrate to one.
struct UserDensity {
    std::function<double(double)> density;
    double lower = 0.0;
    double upper = 0.0;
};

using JumpLaw = std::variant<ExponentialNegative, EmpiricalJumps, UserDensity>;

/// Finite-activity, finite-variation Lévy process
///     X_t = u + mu t + sum_{i <= N_t} Y_i,   N ~ Poisson(lambda).
/// Immutable after construction and safe to share between threads.
class LevyModel {
public:
    static constexpr double martingale_tolerance = 1e-12;

    LevyModel(double u, double mu, double lambda, JumpLaw jump_law);

    double u() const noexcept { return u_; }
    double mu() const noexcept { return mu_; }
    double lambda() const noexcept { return lambda_; }
    const JumpLaw& jump_law() const noexcept { return law_; }

    double mean_jump() const noexcept { return mean_jump_; }
    double jump_second_moment() const noexcept { return jump_m2_; }

    /// beta = mu + lambda E[Y]; zero exactly in the martingale case.
    double beta() const noexcept { return beta_; }
    /// m2 = int y^2 nu(dy) = lambda E[Y^2].
    double second_moment() const noexcept { return lambda_ * jump_m2_; }
    bool is_martingale() const noexcept { return is_martingale_; }
    bool non_conforming() const noexcept { return non_conforming_; }

    /// nu((-inf, -x]) = lambda P(Y <= -x), the default intensity at level x >= 0.
    double tail_mass(double x) const;

    /// lambda * P(Y <= y) for any real y.
    double levy_cdf(double y) const;

    /// Lévy density lambda * p(y); only for absolutely continuous laws.
    double levy_density(double y) const;

    /// Returns the rate if the jump law is exponential-negative, else nullptr.
    const ExponentialNegative* exponential() const noexcept {
        return std::get_if<ExponentialNegative>(&law_);
    }

    double sample_jump(Xoshiro256& rng) const;

    /// Same model started from another initial level.
    LevyModel with_initial(double u) const;

private:
    struct DensityTable;

    double u_;
    double mu_;
    double lambda_;
    JumpLaw law_;
    double mean_jump_ = 0.0;
    double jump_m2_ = 0.0;
    double beta_ = 0.0;
    bool is_martingale_ = false;
    bool non_conforming_ = false;
    std::shared_ptr<const DensityTable> table_;
};

LevyModel build_model(double u, double mu, double lambda, JumpLaw jump_law);

inline double beta(const LevyModel& model) { return model.beta(); }
inline double second_moment(const LevyModel& model) { return model.second_moment(); }
double tail_mass(const LevyModel& model, double x);

}  // namespace levyhedge
