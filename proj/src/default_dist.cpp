#include "levyhedge/default_dist.hpp"

#include <cmath>

#include "levyhedge/errors.hpp"
#include "levyhedge/parallel.hpp"
#include "levyhedge/path_sim.hpp"
#include "levyhedge/payoff.hpp"
#include "levyhedge/rng.hpp"

namespace levyhedge {

Estimate survival_probability(const LevyModel& model, double horizon, double u, std::size_t n_paths,
                              std::uint64_t seed, unsigned threads) {
    if (!(horizon > 0.0)) throw ModelError("horizon must be > 0");
    const auto batch = batch_simulate(model.with_initial(u), horizon, n_paths, seed, threads);
    return {1.0 - batch.default_rate, batch.std_err, batch.n_paths};
}

IdentityReport martingale_identity_check(const LevyModel& model, double t, std::size_t n_paths,
                                         std::uint64_t seed, unsigned threads) {
    const auto* expo = model.exponential();
    if (!expo) throw ModelError("the ruin identity needs an exponential jump law");
    if (!(t > 0.0)) throw ModelError("t must be > 0");
    if (n_paths < 2) throw ModelError("n_paths must be >= 2");

    const auto payoff = Payoff::ruin_identity(model);
    const double ratio = payoff.p1();
    const double exponent = payoff.p2();

    std::vector<double> survive(n_paths);
    std::vector<double> moment(n_paths);
    std::vector<double> value(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t i) {
        const auto path = simulate_path(model, t, RngStream{seed, i});
        if (path.defaulted_by(t)) return;
        const double x = path.at(t);
        survive[i] = 1.0;
        moment[i] = std::exp(exponent * x);
        value[i] = payoff(x);
    });

    IdentityReport r;
    r.t = t;
    r.n_paths = n_paths;
    r.survival = mean_estimate(survive).mean;
    r.scaled_exp_moment = ratio * mean_estimate(moment).mean;
    const auto lhs = mean_estimate(value);
    r.lhs = lhs.mean;
    r.std_err = lhs.std_err;
    r.rhs = payoff(model.u());
    r.discrepancy = r.lhs - r.rhs;
    r.vacuous = std::abs(model.lambda() - model.mu() * expo->rate) <= vacuous_tolerance * model.lambda();
    r.flagged = !r.vacuous && std::abs(r.discrepancy) > 3.0 * r.std_err;
    return r;
}

std::vector<IdentityReport> identity_sweep(const LevyModel& model, const std::vector<double>& times,
                                           std::size_t n_paths, std::uint64_t seed, unsigned threads) {
    std::vector<IdentityReport> out;
    out.reserve(times.size());
    for (std::size_t k = 0; k < times.size(); ++k)
        out.push_back(martingale_identity_check(model, times[k], n_paths, splitmix64_mix(seed + k), threads));
    return out;
}

CompensatorReport intensity_compensator_check(const LevyModel& model, double t, std::size_t n_paths,
                                              std::uint64_t seed, unsigned threads) {
    if (!(t > 0.0)) throw ModelError("t must be > 0");
    if (n_paths < 2) throw ModelError("n_paths must be >= 2");
    std::vector<double> hit(n_paths);
    std::vector<double> comp(n_paths);
    std::vector<double> diff(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t i) {
        const auto path = simulate_path(model, t, RngStream{seed, i});
        hit[i] = path.defaulted_by(t) ? 1.0 : 0.0;
        comp[i] = compensator_integral(model, path, t);
        diff[i] = hit[i] - comp[i];
    });

    CompensatorReport r;
    r.t = t;
    r.default_indicator = mean_estimate(hit);
    r.compensator = mean_estimate(comp);
    r.difference = r.default_indicator.mean - r.compensator.mean;
    r.combined_std_err = combined_std_err(r.default_indicator.std_err, r.compensator.std_err);
    r.paired_std_err = mean_estimate(diff).std_err;
    r.within_3se = std::abs(r.difference) <= 3.0 * r.paired_std_err;
    return r;
}

}  // namespace levyhedge
