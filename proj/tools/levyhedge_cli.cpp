#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "levyhedge/errors.hpp"
#include "levyhedge/io/commands.hpp"
#include "levyhedge/io/config.hpp"
#include "levyhedge/parallel.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_convergence = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Locally risk-minimizing hedging of defaultable claims under a jump-drift firm value"};
    app.require_subcommand(1);

    std::string config_path;
    unsigned threads = levyhedge::default_threads();
    std::string out_dir;

    const char* names[] = {"simulate", "surface", "hedge", "identity", "riskfree"};
    const char* help[] = {
        "batch paths, default rate and compensator check",
        "Monte-Carlo value surface, CSV/JSON dump and PIDE residual",
        "hedge records and hedge-error statistics",
        "ruin identity sweep over identity.times",
        "L-operator residual report for a stored or estimated surface",
    };
    for (int i = 0; i < 5; ++i) {
        auto* sub = app.add_subcommand(names[i], help[i]);
        sub->add_option("--config", config_path, "run configuration (JSON)")->required();
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        auto config = levyhedge::io::load_config(config_path);
        levyhedge::io::apply_environment(config);
        levyhedge::io::CommandOptions options;
        options.threads = threads;
        if (!out_dir.empty()) options.out_dir = out_dir;
        const auto report = levyhedge::io::run_command(command, config, options);
        std::cout << report.to_json().dump(2) << '\n';
        return 0;
    } catch (const levyhedge::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const levyhedge::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << " (estimate " << e.estimate() << ", error bound "
                  << e.error_bound() << ")\n";
        return exit_convergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
