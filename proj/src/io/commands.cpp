#include "levyhedge/io/commands.hpp"

#include <chrono>
#include <filesystem>

#include "levyhedge/default_dist.hpp"
#include "levyhedge/errors.hpp"
#include "levyhedge/hedging.hpp"
#include "levyhedge/io/files.hpp"
#include "levyhedge/operators.hpp"
#include "levyhedge/path_sim.hpp"
#include "levyhedge/rng.hpp"
#include "levyhedge/value_surface.hpp"

namespace levyhedge::io {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

fs::path output_dir(const RunConfig& config, const CommandOptions& options) {
    return options.out_dir ? fs::path(*options.out_dir) : fs::path(config.output.directory);
}

RunReport start(const std::string& command, const RunConfig& config) {
    RunReport r;
    r.command = command;
    r.config_hash = config_hash(config);
    r.seed = config.mc.base_seed;
    return r;
}

// Writes <command>_summary.json (no timing information) when JSON output is on.
void finish(RunReport& r, const RunConfig& config, const fs::path& dir, Clock::time_point began) {
    if (config.wants("json")) {
        const json summary = {{"command", r.command},
                              {"config_hash", r.config_hash},
                              {"seed", r.seed},
                              {"config", to_json(config)},
                              {"headline", r.headline}};
        const auto path = dir / (r.command + "_summary.json");
        write_atomic(path, summary.dump(2) + "\n");
        r.files.push_back(path.string());
    }
    r.wall_time_s = std::chrono::duration<double>(Clock::now() - began).count();
}

void write_csv(RunReport& r, const RunConfig& config, const fs::path& path, const std::string& body) {
    if (!config.wants("csv")) return;
    write_atomic(path, body);
    r.files.push_back(path.string());
}

Eigen::VectorXd x_grid_for(const RunConfig& config, const LevyModel& model) {
    const double x_max = config.grid.x_max ? *config.grid.x_max : default_x_max(model, config.horizon);
    return uniform_grid(0.0, x_max, config.grid.x_nodes);
}

ValueSurface obtain_surface(const RunConfig& config, const LevyModel& model, const Payoff& payoff,
                            const CommandOptions& options, json& provenance) {
    if (config.surface_file) {
        if (!fs::exists(*config.surface_file))
            throw ConfigError("surface_file", "file not found: '" + *config.surface_file + "'");
        auto s = load_surface(*config.surface_file);
        if (s.horizon != config.horizon) throw ConfigError("surface_file", "surface horizon differs from config");
        provenance = {{"source", "file"}, {"path", *config.surface_file}};
        return s;
    }
    SurfaceOptions so;
    so.n_paths = config.mc.surface_paths;
    so.seed = config.mc.base_seed;
    so.threads = options.threads;
    so.nonmartingale_ack = config.mc.nonmartingale_ack;
    provenance = {{"source", "estimated"}, {"n_paths_per_node", config.mc.surface_paths}};
    return estimate_surface(model, payoff, config.horizon, uniform_grid(0.0, config.horizon, config.grid.t_nodes),
                            x_grid_for(config, model), so);
}

ThetaMethod theta_method(const std::string& name) {
    if (name == "general") return ThetaMethod::general;
    if (name == "exponential") return ThetaMethod::exponential;
    return ThetaMethod::automatic;
}

double interpolated_std_err(const ValueSurface& s, double t, double x) {
    ValueSurface err = s;
    err.values = s.std_err;
    return as_surface_fn(err).value(t, x);
}

}  // namespace

json RunReport::to_json() const {
    return {{"command", command},   {"config_hash", config_hash}, {"seed", seed},
            {"wall_time_s", wall_time_s}, {"headline", headline},   {"files", files}};
}

RunReport cmd_simulate(const RunConfig& config, const CommandOptions& options) {
    const auto began = Clock::now();
    auto r = start("simulate", config);
    const auto dir = output_dir(config, options);
    const auto model = build_model(config.model);
    const auto batch =
        batch_simulate(model, config.horizon, config.mc.n_paths, config.mc.base_seed, options.threads,
                       config.mc.dump_paths);

    std::vector<double> times = config.mc.compensator_times;
    if (times.empty()) times = {config.horizon / 4, config.horizon / 2, config.horizon};
    json checks = json::array();
    const std::uint64_t fresh = domain_seed(config.mc.base_seed, StreamDomain::fresh);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto c = intensity_compensator_check(model, times[k], config.mc.n_paths, splitmix64_mix(fresh + k),
                                                   options.threads);
        checks.push_back({{"t", c.t},
                          {"default_mean", c.default_indicator.mean},
                          {"default_std_err", c.default_indicator.std_err},
                          {"compensator_mean", c.compensator.mean},
                          {"compensator_std_err", c.compensator.std_err},
                          {"difference", c.difference},
                          {"combined_std_err", c.combined_std_err},
                          {"paired_std_err", c.paired_std_err},
                          {"within_3se", c.within_3se}});
    }

    r.headline = {{"n_paths", batch.n_paths},
                  {"n_defaults", batch.n_defaults},
                  {"default_rate", batch.default_rate},
                  {"std_err", batch.std_err},
                  {"creep_violations", batch.creep_violations},
                  {"beta", model.beta()},
                  {"m2", model.second_moment()},
                  {"non_conforming", model.non_conforming()},
                  {"compensator", checks}};
    write_csv(r, config, dir / "paths.csv", paths_csv(batch.retained));
    finish(r, config, dir, began);
    return r;
}

RunReport cmd_surface(const RunConfig& config, const CommandOptions& options) {
    const auto began = Clock::now();
    auto r = start("surface", config);
    const auto dir = output_dir(config, options);
    const auto model = build_model(config.model);
    const auto payoff = build_payoff(config.payoff, model);
    json provenance;
    RunConfig fresh = config;
    fresh.surface_file.reset();
    const auto surface = obtain_surface(fresh, model, payoff, options, provenance);

    const auto f = as_surface_fn(surface);
    r.headline = {{"f_hat_0_u", f.value(0.0, model.u())},
                  {"std_err_0_u", interpolated_std_err(surface, 0.0, model.u())},
                  {"boundary_error", boundary_error(surface)},
                  {"n_paths_per_node", surface.n_paths_per_node},
                  {"t_nodes", surface.t_grid.size()},
                  {"x_nodes", surface.x_grid.size()},
                  {"x_max", surface.x_grid(surface.x_grid.size() - 1)}};

    if (config.wants("csv")) {
        write_atomic(dir / "surface.csv", surface_csv(surface));
        r.files.push_back((dir / "surface.csv").string());
    }
    if (config.wants("json")) {
        write_atomic(dir / "surface.json", surface_metadata(surface, to_json(config)["model"], "surface.csv").dump(2) + "\n");
        r.files.push_back((dir / "surface.json").string());
    }

    if (model.is_martingale()) {
        const auto pide = pide_residual(surface, model, config.quad);
        CsvWriter out{"t", "x", "residual", "noise_bound"};
        for (Eigen::Index i = 0; i < surface.t_grid.size(); ++i)
            for (Eigen::Index j = 0; j < surface.x_grid.size(); ++j) {
                if (std::isnan(pide.residual(i, j))) continue;
                out.cell(surface.t_grid(i)).cell(surface.x_grid(j)).cell(pide.residual(i, j)).cell(pide.noise_bound(i, j)).end_row();
            }
        write_csv(r, config, dir / "pide_residual.csv", out.str());
        r.headline["pide_interior_fraction_within_5x"] = pide.interior_fraction_within(5.0);
    } else {
        r.headline["pide_residual"] = "skipped: beta != 0";
    }
    finish(r, config, dir, began);
    return r;
}

RunReport cmd_hedge(const RunConfig& config, const CommandOptions& options) {
    const auto began = Clock::now();
    auto r = start("hedge", config);
    const auto dir = output_dir(config, options);
    const auto model = build_model(config.model);
    const auto payoff = build_payoff(config.payoff, model);
    json provenance;
    const auto surface = obtain_surface(config, model, payoff, options, provenance);
    const auto dates = uniform_dates(config.horizon, config.hedge.n_trading_dates);
    const auto method = theta_method(config.hedge.theta);

    HedgeStatsOptions ho;
    ho.n_paths = config.hedge.n_paths;
    ho.seed = config.mc.base_seed;
    ho.threads = options.threads;
    ho.quad = config.quad;
    ho.method = method;
    const auto stats = hedge_error_stats(model, surface, dates, ho);

    if (config.hedge.dump_paths > 0 && config.wants("csv")) {
        const auto f = as_surface_fn(surface);
        const std::uint64_t seed = domain_seed(config.mc.base_seed, StreamDomain::hedge);
        auto out = hedge_csv_writer();
        for (std::uint64_t i = 0; i < config.hedge.dump_paths; ++i) {
            const auto path = simulate_path(model, config.horizon, RngStream{seed, i});
            append_hedge_csv(out, i, build_strategy(surface, f, model, path, dates, config.quad, method));
        }
        write_csv(r, config, dir / "hedge.csv", out.str());
    }

    r.headline = {{"surface", provenance},
                  {"n_paths", stats.n_paths},
                  {"n_trading_dates", config.hedge.n_trading_dates},
                  {"V0", stats.v0},
                  {"V0_std_err", stats.v0_std_err},
                  {"mean_L_T", stats.mean_L},
                  {"mean_L_T_std_err", stats.mean_L_std_err},
                  {"mean_L_T_combined_std_err", stats.mean_L_combined_std_err},
                  {"var_L_T", stats.var_L},
                  {"var_L_T_std_err", stats.var_L_std_err},
                  {"corr_dL_dX", stats.corr},
                  {"corr_std_err", stats.corr_std_err},
                  {"n_pairs", stats.n_pairs},
                  {"accounting_value_mismatches", stats.accounting.value_mismatches},
                  {"accounting_cost_mismatches", stats.accounting.cost_mismatches},
                  {"accounting_decomposition_mismatches", stats.accounting.decomposition_mismatches}};
    finish(r, config, dir, began);
    return r;
}

RunReport cmd_identity(const RunConfig& config, const CommandOptions& options) {
    const auto began = Clock::now();
    auto r = start("identity", config);
    const auto dir = output_dir(config, options);
    const auto model = build_model(config.model);
    const auto reports = identity_sweep(model, config.identity.times, config.identity.n_paths,
                                        domain_seed(config.mc.base_seed, StreamDomain::fresh), options.threads);

    CsvWriter out{"t", "lhs", "rhs", "se"};
    json rows = json::array();
    for (const auto& rep : reports) {
        out.cell(rep.t).cell(rep.lhs).cell(rep.rhs).cell(rep.std_err).end_row();
        rows.push_back({{"t", rep.t},
                        {"survival", rep.survival},
                        {"scaled_exp_moment", rep.scaled_exp_moment},
                        {"lhs", rep.lhs},
                        {"rhs", rep.rhs},
                        {"discrepancy", rep.discrepancy},
                        {"std_err", rep.std_err},
                        {"flagged", rep.flagged},
                        {"vacuous", rep.vacuous}});
    }
    write_csv(r, config, dir / "identity.csv", out.str());
    r.headline = {{"n_paths", config.identity.n_paths}, {"reports", rows}};
    finish(r, config, dir, began);
    return r;
}

RunReport cmd_riskfree(const RunConfig& config, const CommandOptions& options) {
    const auto began = Clock::now();
    auto r = start("riskfree", config);
    const auto dir = output_dir(config, options);
    const auto model = build_model(config.model);
    const auto payoff = build_payoff(config.payoff, model);
    json provenance;
    const auto surface = obtain_surface(config, model, payoff, options, provenance);
    const auto f = as_surface_fn(surface);

    const double x_max = surface.x_grid(surface.x_grid.size() - 1);
    const int nt = config.riskfree.t_nodes;
    const int nx = config.riskfree.x_nodes;
    const Eigen::VectorXd t_nodes =
        nt == 1 ? Eigen::VectorXd::Constant(1, 0.0) : uniform_grid(0.0, config.horizon, nt);
    Eigen::VectorXd x_nodes(nx);
    for (int j = 0; j < nx; ++j) x_nodes(j) = x_max * (j + 1) / nx;

    const auto report = risk_free_check(f, model, config.quad, t_nodes, x_nodes, config.riskfree.tolerance);

    CsvWriter out{"t", "x", "A_f", "K_f", "L_f", "theta"};
    for (Eigen::Index i = 0; i < t_nodes.size(); ++i)
        for (Eigen::Index j = 0; j < x_nodes.size(); ++j) {
            const double t = t_nodes(i);
            const double x = x_nodes(j);
            const double k = apply_K_op(f, t, x, model, config.quad);
            out.cell(t)
                .cell(x)
                .cell(apply_A(f, t, x, model, config.quad))
                .cell(k)
                .cell(report.residual(i, j))
                .cell(k / model.second_moment())
                .end_row();
        }
    write_csv(r, config, dir / "riskfree.csv", out.str());

    r.headline = {{"surface", provenance},
                  {"sup", report.sup},
                  {"rms", report.rms},
                  {"tolerance", report.tolerance},
                  {"verdict", report.risk_free ? "risk-free within tolerance" : "not risk-free"}};
    finish(r, config, dir, began);
    return r;
}

RunReport run_command(const std::string& name, const RunConfig& config, const CommandOptions& options) {
    if (name == "simulate") return cmd_simulate(config, options);
    if (name == "surface") return cmd_surface(config, options);
    if (name == "hedge") return cmd_hedge(config, options);
    if (name == "identity") return cmd_identity(config, options);
    if (name == "riskfree") return cmd_riskfree(config, options);
    throw ConfigError("<command>", "unknown command '" + name + "'");
}

}  // namespace levyhedge::io
