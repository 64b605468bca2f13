#include "levyhedge/hedging.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "levyhedge/parallel.hpp"
#include "levyhedge/rng.hpp"
#include "levyhedge/stats.hpp"

namespace levyhedge {

namespace {

constexpr int max_eta_nudges = 8;
constexpr int max_theta_shifts = 16;
constexpr std::size_t max_jackknife_groups = 100;

ThetaMethod resolve(ThetaMethod method, const LevyModel& model) {
    if (method != ThetaMethod::automatic) return method;
    return model.exponential() && model.is_martingale() ? ThetaMethod::exponential : ThetaMethod::general;
}

void check_dates(const Eigen::VectorXd& dates, double horizon) {
    if (dates.size() < 2) throw ModelError("trading dates need at least 0 and T");
    if (dates(0) != 0.0 || dates(dates.size() - 1) != horizon)
        throw ModelError("trading dates must start at 0 and end at T");
    for (Eigen::Index k = 1; k < dates.size(); ++k)
        if (!(dates(k) > dates(k - 1))) throw ModelError("trading dates must be strictly increasing");
}

struct Position {
    double theta;
    double eta;
};

// Units (theta, eta) with fl(theta * x + eta) == v exactly. theta moves by at
// most a few ulps when no eta reaches v for the computed theta.
Position split_position(double v, double theta, double x) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    double candidate = theta;
    for (int shift = 0; shift < max_theta_shifts; ++shift) {
        const double held = candidate * x;
        double eta = v - held;
        for (int i = 0; i < max_eta_nudges; ++i) {
            const double back = held + eta;
            if (back == v) return {candidate, eta};
            eta = std::nextafter(eta, back < v ? inf : -inf);
        }
        // theta, theta+, theta-, theta++, theta--, ...
        double next = theta;
        for (int k = 0; k < shift / 2 + 1; ++k) next = std::nextafter(next, shift % 2 == 0 ? inf : -inf);
        candidate = next;
    }
    return {theta, v - theta * x};
}

}  // namespace

Eigen::VectorXd uniform_dates(double horizon, Eigen::Index n_intervals) {
    if (!(horizon > 0.0)) throw ModelError("horizon must be > 0");
    if (n_intervals < 1) throw ModelError("need at least one trading interval");
    Eigen::VectorXd dates = Eigen::VectorXd::LinSpaced(n_intervals + 1, 0.0, horizon);
    dates(n_intervals) = horizon;
    return dates;
}

HedgeRecord build_strategy(const ValueSurface& surface, const LevyModel& model, const SamplePath& path,
                           const Eigen::VectorXd& dates, const QuadSpec& quad, ThetaMethod method) {
    return build_strategy(surface, as_surface_fn(surface), model, path, dates, quad, method);
}

HedgeRecord build_strategy(const ValueSurface& surface, const GridSurface<double>& f, const LevyModel& model,
                           const SamplePath& path, const Eigen::VectorXd& dates, const QuadSpec& quad,
                           ThetaMethod method) {
    if (boundary_error(surface) != 0.0) throw ModelError("surface terminal row does not match its payoff");
    if (path.horizon != surface.horizon) throw ModelError("path horizon differs from surface horizon");
    check_dates(dates, path.horizon);
    method = resolve(method, model);

    const Eigen::Index n = dates.size();
    HedgeRecord rec;
    rec.dates = dates;
    rec.x.resize(n);
    rec.theta.resize(n);
    rec.eta.resize(n);
    rec.value.resize(n);
    rec.stoch_int.resize(n);
    rec.hedge_error.resize(n);
    rec.cost.resize(n);
    rec.tau = path.tau;

    for (Eigen::Index k = 0; k < n; ++k) {
        const double t = dates(k);
        const double x = path.at(t);
        const bool alive = !path.defaulted_by(t);
        rec.x(k) = x;

        double theta = 0.0;
        if (alive && x > 0.0) {
            theta = method == ThetaMethod::exponential ? theta_exponential(f, t, x, model, quad, false)
                                                       : theta_general(f, t, x, model, quad, false);
        }
        double v = 0.0;
        if (alive) v = k + 1 == n ? surface.payoff(x) : f.value(t, x);
        const auto pos = split_position(v, theta, x);
        rec.theta(k) = pos.theta;
        rec.eta(k) = pos.eta;
        rec.value(k) = v;

        rec.stoch_int(k) = k == 0 ? 0.0 : rec.stoch_int(k - 1) + rec.theta(k - 1) * (x - rec.x(k - 1));
        rec.cost(k) = v - rec.stoch_int(k);
        rec.hedge_error(k) = rec.cost(k) - rec.cost(0);
    }
    rec.payoff = rec.value(n - 1);
    return rec;
}

AccountingCheck check_accounting(const HedgeRecord& record) {
    AccountingCheck check;
    const double v0 = record.value(0);
    const double c0 = record.cost(0);
    for (Eigen::Index k = 0; k < record.size(); ++k) {
        if (record.theta(k) * record.x(k) + record.eta(k) != record.value(k)) ++check.value_mismatches;
        if (record.cost(k) - c0 != record.hedge_error(k)) ++check.cost_mismatches;
        if (((record.value(k) - record.stoch_int(k)) - v0) - record.hedge_error(k) != 0.0)
            ++check.decomposition_mismatches;
    }
    return check;
}

namespace {

// Sums for the pooled correlation: n, sum dL, sum dX, sum dL^2, sum dX^2, sum dL dX.
using PairSums = std::array<double, 6>;

double pooled_corr(const PairSums& s) {
    if (s[0] < 2.0) return 0.0;
    const double n = s[0];
    const double ml = s[1] / n;
    const double mx = s[2] / n;
    const double cll = s[3] / n - ml * ml;
    const double cxx = s[4] / n - mx * mx;
    const double clx = s[5] / n - ml * mx;
    if (!(cll > 0.0) || !(cxx > 0.0)) return 0.0;
    return clx / std::sqrt(cll * cxx);
}

struct PathSummary {
    double final_L = 0.0;
    PairSums sums{};
    AccountingCheck accounting;
};

}  // namespace

HedgeErrorStats hedge_error_stats(const LevyModel& model, const ValueSurface& surface,
                                  const Eigen::VectorXd& dates, const HedgeStatsOptions& options) {
    if (!model.is_martingale()) throw ModelError("hedge error statistics need the martingale case beta = 0");
    if (options.n_paths < 2) throw ModelError("n_paths must be >= 2");
    const auto f = as_surface_fn(surface);
    const double horizon = surface.horizon;
    const std::uint64_t seed = domain_seed(options.seed, StreamDomain::hedge);

    std::vector<PathSummary> per_path(options.n_paths);
    parallel_for(options.n_paths, options.threads, [&](std::size_t i) {
        const auto path = simulate_path(model, horizon, RngStream{seed, i});
        const auto rec = build_strategy(surface, f, model, path, dates, options.quad, options.method);
        auto& out = per_path[i];
        out.final_L = rec.hedge_error(rec.size() - 1);
        out.accounting = check_accounting(rec);
        for (Eigen::Index k = 0; k + 1 < rec.size(); ++k) {
            if (path.defaulted_by(rec.dates(k))) break;
            const double dl = rec.hedge_error(k + 1) - rec.hedge_error(k);
            const double dx = rec.x(k + 1) - rec.x(k);
            out.sums[0] += 1.0;
            out.sums[1] += dl;
            out.sums[2] += dx;
            out.sums[3] += dl * dl;
            out.sums[4] += dx * dx;
            out.sums[5] += dl * dx;
        }
    });

    HedgeErrorStats stats;
    stats.n_paths = options.n_paths;
    stats.n_dates = static_cast<std::size_t>(dates.size());
    stats.v0 = f.value(0.0, model.u());
    stats.v0_std_err = GridSurface<double>(ValueSurface{surface.t_grid, surface.x_grid, surface.std_err,
                                                        surface.std_err, surface.payoff, surface.horizon,
                                                        surface.n_paths_per_node, surface.seed})
                           .value(0.0, model.u());

    std::vector<double> finals(options.n_paths);
    for (std::size_t i = 0; i < options.n_paths; ++i) {
        finals[i] = per_path[i].final_L;
        const auto& a = per_path[i].accounting;
        stats.accounting.value_mismatches += a.value_mismatches;
        stats.accounting.cost_mismatches += a.cost_mismatches;
        stats.accounting.decomposition_mismatches += a.decomposition_mismatches;
        if (!a.exact()) ++stats.paths_with_accounting_errors;
    }
    const auto est = mean_estimate(finals);
    stats.mean_L = est.mean;
    stats.mean_L_std_err = est.std_err;
    stats.mean_L_combined_std_err = combined_std_err(est.std_err, stats.v0_std_err);

    std::vector<double> dev2(options.n_paths);
    std::vector<double> dev4(options.n_paths);
    for (std::size_t i = 0; i < options.n_paths; ++i) {
        const double d = finals[i] - est.mean;
        dev2[i] = d * d;
        dev4[i] = dev2[i] * dev2[i];
    }
    const double n = static_cast<double>(options.n_paths);
    const double m2 = pairwise_sum(dev2) / n;
    const double m4 = pairwise_sum(dev4) / n;
    stats.var_L = m2 * n / (n - 1.0);
    stats.var_L_std_err = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);

    // Pooled correlation with a delete-a-group jackknife over contiguous path groups.
    const std::size_t groups = std::min(max_jackknife_groups, options.n_paths);
    std::vector<PairSums> group_sums(groups, PairSums{});
    for (std::size_t i = 0; i < options.n_paths; ++i) {
        auto& g = group_sums[i * groups / options.n_paths];
        for (std::size_t c = 0; c < 6; ++c) g[c] += per_path[i].sums[c];
    }
    PairSums total{};
    for (const auto& g : group_sums)
        for (std::size_t c = 0; c < 6; ++c) total[c] += g[c];
    stats.n_pairs = static_cast<std::size_t>(total[0]);
    stats.corr = pooled_corr(total);

    std::vector<double> leave_out(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        PairSums s = total;
        for (std::size_t c = 0; c < 6; ++c) s[c] -= group_sums[g][c];
        leave_out[g] = pooled_corr(s);
    }
    const double gbar = pairwise_sum(leave_out) / static_cast<double>(groups);
    double ss = 0.0;
    for (double c : leave_out) ss += (c - gbar) * (c - gbar);
    stats.corr_std_err = std::sqrt(ss * static_cast<double>(groups - 1) / static_cast<double>(groups));
    return stats;
}

}  // namespace levyhedge
