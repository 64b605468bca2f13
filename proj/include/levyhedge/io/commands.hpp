#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "levyhedge/io/config.hpp"

namespace levyhedge::io {

struct CommandOptions {
    unsigned threads = 1;
    std::optional<std::string> out_dir;  ///< overrides output.directory
};

/// Printed on stdout. Everything except wall_time_s is a pure function of
/// the configuration.
struct RunReport {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
    nlohmann::json headline = nlohmann::json::object();
    std::vector<std::string> files;

    nlohmann::json to_json() const;
};

RunReport cmd_simulate(const RunConfig& config, const CommandOptions& options);
RunReport cmd_surface(const RunConfig& config, const CommandOptions& options);
RunReport cmd_hedge(const RunConfig& config, const CommandOptions& options);
RunReport cmd_identity(const RunConfig& config, const CommandOptions& options);
RunReport cmd_riskfree(const RunConfig& config, const CommandOptions& options);

/// Dispatch by name: simulate | surface | hedge | identity | riskfree.
RunReport run_command(const std::string& name, const RunConfig& config, const CommandOptions& options);

}  // namespace levyhedge::io
