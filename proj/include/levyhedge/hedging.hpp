#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

#include "levyhedge/levy_model.hpp"
#include "levyhedge/operators.hpp"
#include "levyhedge/path_sim.hpp"
#include "levyhedge/value_surface.hpp"

namespace levyhedge {

enum class ThetaMethod {
    automatic,    ///< exponential formula for exponential jumps with beta = 0, general otherwise
    general,      ///< K f / m2
    exponential,
};

/// One hedged path on trading dates t_0 = 0 < ... < t_N = T. Entry k of
/// theta and eta is the position held on (t_k, t_{k+1}].
struct HedgeRecord {
    Eigen::VectorXd dates;
    Eigen::VectorXd x;
    Eigen::VectorXd theta;
    Eigen::VectorXd eta;
    Eigen::VectorXd value;
    Eigen::VectorXd stoch_int;
    Eigen::VectorXd hedge_error;
    Eigen::VectorXd cost;
    double payoff = 0.0;
    std::optional<double> tau;

    Eigen::Index size() const noexcept { return dates.size(); }
};

struct AccountingCheck {
    std::size_t value_mismatches = 0;   ///< dates with fl(theta x + eta) != V
    std::size_t cost_mismatches = 0;    ///< dates with C - C_0 != L
    std::size_t decomposition_mismatches = 0;  ///< dates with ((V - S) - V_0) - L != 0
    bool exact() const noexcept {
        return value_mismatches == 0 && cost_mismatches == 0 && decomposition_mismatches == 0;
    }
};

AccountingCheck check_accounting(const HedgeRecord& record);

/// N + 1 equally spaced dates on [0, T].
Eigen::VectorXd uniform_dates(double horizon, Eigen::Index n_intervals);

/// Locally risk-minimizing strategy along one path. The surface's terminal
/// row must equal its payoff.
HedgeRecord build_strategy(const ValueSurface& surface, const LevyModel& model, const SamplePath& path,
                           const Eigen::VectorXd& dates, const QuadSpec& quad = {},
                           ThetaMethod method = ThetaMethod::automatic);

/// Same with a prebuilt interpolant (the surface is still needed for its payoff).
HedgeRecord build_strategy(const ValueSurface& surface, const GridSurface<double>& f, const LevyModel& model,
                           const SamplePath& path, const Eigen::VectorXd& dates, const QuadSpec& quad = {},
                           ThetaMethod method = ThetaMethod::automatic);

struct HedgeErrorStats {
    std::size_t n_paths = 0;
    std::size_t n_dates = 0;
    double v0 = 0.0;
    double v0_std_err = 0.0;      ///< surface MC error at (0, u)
    double mean_L = 0.0;
    double mean_L_std_err = 0.0;  ///< over paths only
    double mean_L_combined_std_err = 0.0;
    double var_L = 0.0;
    double var_L_std_err = 0.0;
    double corr = 0.0;            ///< pooled corr(dL_k, dX_k) over intervals started before default
    double corr_std_err = 0.0;    ///< delete-a-group jackknife
    std::size_t n_pairs = 0;
    AccountingCheck accounting;
    std::size_t paths_with_accounting_errors = 0;
};

struct HedgeStatsOptions {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    QuadSpec quad{};
    ThetaMethod method = ThetaMethod::automatic;
};

/// Monte-Carlo summary of the hedge error L_T over fresh paths.
HedgeErrorStats hedge_error_stats(const LevyModel& model, const ValueSurface& surface,
                                  const Eigen::VectorXd& dates, const HedgeStatsOptions& options);

struct RiskFreeReport {
    Eigen::VectorXd t_nodes;
    Eigen::VectorXd x_nodes;
    Eigen::MatrixXd residual;  ///< L f on the node grid
    double sup = 0.0;
    double rms = 0.0;
    double tolerance = 0.0;
    bool risk_free = false;
};

/// Evaluates L f on the grid; the claim is declared risk-free iff the sup norm
/// is below `tolerance`. x nodes must be > 0.
template <SurfaceFn S>
RiskFreeReport risk_free_check(const S& f, const LevyModel& model, const QuadSpec& quad,
                               const Eigen::VectorXd& t_nodes, const Eigen::VectorXd& x_nodes, double tolerance) {
    RiskFreeReport report;
    report.t_nodes = t_nodes;
    report.x_nodes = x_nodes;
    report.tolerance = tolerance;
    report.residual.resize(t_nodes.size(), x_nodes.size());
    for (Eigen::Index i = 0; i < t_nodes.size(); ++i)
        for (Eigen::Index j = 0; j < x_nodes.size(); ++j)
            report.residual(i, j) = apply_L(f, t_nodes(i), x_nodes(j), model, quad);
    if (report.residual.size() > 0) {
        report.sup = report.residual.cwiseAbs().maxCoeff();
        report.rms = std::sqrt(report.residual.squaredNorm() / static_cast<double>(report.residual.size()));
    }
    report.risk_free = report.sup < tolerance;
    return report;
}

}  // namespace levyhedge
