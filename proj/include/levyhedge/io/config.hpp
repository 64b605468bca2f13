#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levyhedge/levy_model.hpp"
#include "levyhedge/payoff.hpp"
#include "levyhedge/quadrature.hpp"

namespace levyhedge::io {

struct JumpLawConfig {
    std::string kind = "exponential";  ///< exponential | empirical | uniform
    double rate = 100.0;               ///< exponential
    std::vector<double> samples;       ///< empirical
    double lower = -1.0;               ///< uniform
    double upper = 0.0;
};

struct ModelConfig {
    double u = 0.01;
    double mu = 0.1;
    double lambda = 10.0;
    JumpLawConfig jump_law;
};

struct PayoffConfig {
    std::string kind = "constant";  ///< constant | linear | exp_shift | ruin_identity
    double c = 1.0;                 ///< constant value, linear intercept, exp_shift constant
    double a = 0.0;                 ///< linear slope, exp_shift scale
    double b = 0.0;                 ///< exp_shift rate
};

struct GridConfig {
    int t_nodes = 81;
    int x_nodes = 81;
    std::optional<double> x_max;
};

struct McConfig {
    std::uint64_t n_paths = 200000;
    std::uint64_t base_seed = 20240601;
    std::uint64_t surface_paths = 100000;
    bool nonmartingale_ack = false;
    std::vector<double> compensator_times;  ///< empty: T/4, T/2, T
    std::uint64_t dump_paths = 10;
};

struct HedgeConfig {
    int n_trading_dates = 1000;
    std::uint64_t n_paths = 10000;
    std::uint64_t dump_paths = 1;
    std::string theta = "automatic";  ///< automatic | general | exponential
};

struct IdentityConfig {
    std::vector<double> times{0.25, 0.5, 1.0};
    std::uint64_t n_paths = 100000;
};

struct RiskFreeConfig {
    double tolerance = 1e-6;
    int t_nodes = 20;
    int x_nodes = 20;
};

struct OutputConfig {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "json"};
};

struct RunConfig {
    ModelConfig model;
    double horizon = 2.0;
    PayoffConfig payoff;
    GridConfig grid;
    McConfig mc;
    HedgeConfig hedge;
    QuadSpec quad;
    IdentityConfig identity;
    RiskFreeConfig riskfree;
    std::optional<std::string> surface_file;
    OutputConfig output;

    bool wants(const std::string& format) const;
};

/// Strict parse: unknown keys and out-of-range values raise ConfigError with
/// the dotted field path.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// LEVYHEDGE_SEED, when set, replaces mc.base_seed.
void apply_environment(RunConfig& config);

/// Canonical JSON form; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& config);

/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const RunConfig& config);

LevyModel build_model(const ModelConfig& config);
Payoff build_payoff(const PayoffConfig& config, const LevyModel& model);

}  // namespace levyhedge::io
