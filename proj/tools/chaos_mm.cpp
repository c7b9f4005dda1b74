#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chaosmm/version.hpp"
#include "cli/commands.hpp"
#include "cli/config.hpp"

namespace cli = chaosmm::cli;

int main(int argc, char** argv) {
    CLI::App app{"Hamiltonian market-maker chaos experiments", "chaos-mm"};
    app.set_version_flag("--version", std::string(chaosmm::kVersion));
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir;
    std::size_t workers = 1;
    bool svg = false;

    for (const char* name : {"simulate", "poincare", "lyapunov", "kam-check", "sample-hist", "potential-grid"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
        sub->add_option("--workers", workers, "worker threads for ensembles; 0 means all cores");
        sub->add_flag("--svg", svg, "also write SVG scatter plots");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    cli::RunConfig config;
    try {
        config = cli::load_config(config_path);
        cli::apply_seed_override(config, std::getenv("CHAOS_MM_SEED"));
        if (cli::to_string(config.experiment) != command) {
            throw cli::ConfigError("experiment: config describes '" + std::string(cli::to_string(config.experiment)) +
                                   "' but command is '" + command + "'");
        }
    } catch (const cli::ConfigError& e) {
        std::cerr << "chaos-mm: config error: " << e.what() << '\n';
        return cli::kExitConfig;
    }

    cli::RunOptions options;
    if (!out_dir.empty()) options.out_dir = out_dir;
    options.workers = workers;
    options.svg = svg;

    const cli::RunReport report = cli::run_command(config, options);
    if (report.exit_code != cli::kExitOk) {
        std::cerr << "chaos-mm: " << command << " failed: " << report.message << '\n';
    }
    for (const auto& f : report.files) std::cout << f.string() << '\n';
    return report.exit_code;
}
