#include <CLI11.hpp>
#include <iostream>

#include "agg/cli.hpp"

// Batch front end. Exit codes: 0 ok, 2 config error, 3 budget error,
// 4 non-convergence, 5 I/O error.
int main(int argc, char** argv) {
    CLI::App app{
        "Penalized least-squares aggregation over a fixed dictionary: "
        "BIC-type and weighted-l1 aggregates, oracle risks, inequality "
        "checks and rate sweeps.\n"
        "Exit codes: 0 ok, 2 config error, 3 budget error, 4 non-convergence, 5 I/O error."};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool no_plot = false;

    const char* descs[] = {
        "Fit the configured penalized least-squares aggregate",
        "Compute noiseless oracle risks (MS/C/L/S)",
        "Monte Carlo check of an oracle inequality",
        "Risk-vs-rate sweep over n/M grids",
    };
    const char* names[] = {"aggregate", "oracle", "check-ineq", "rate-sweep"};
    for (int i = 0; i < 4; ++i) {
        auto* sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--seed", seed, "override the config noise seed");
        sub->add_option("--out", out_dir, "override the config output directory");
        sub->add_flag("--no-plot", no_plot, "skip SVG output");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string chosen = app.get_subcommands().front()->get_name();

    try {
        agg::cli::ExperimentConfig cfg = agg::cli::load_config(config_path);
        // The subcommand must agree with the config's command field.
        std::string cfg_cmd;
        switch (cfg.command) {
            case agg::cli::Command::Aggregate: cfg_cmd = "aggregate"; break;
            case agg::cli::Command::Oracle: cfg_cmd = "oracle"; break;
            case agg::cli::Command::CheckIneq: cfg_cmd = "check-ineq"; break;
            case agg::cli::Command::RateSweep: cfg_cmd = "rate-sweep"; break;
        }
        if (cfg_cmd != chosen) {
            throw agg::ConfigError("subcommand '" + chosen + "' does not match config command '" +
                                   cfg_cmd + "'");
        }
        agg::cli::RunOptions opts;
        opts.seed_override = seed;
        opts.out_override = out_dir;
        opts.plot = !no_plot;
        agg::cli::run(cfg, opts);
        return 0;
    } catch (const std::exception& e) {
        const int code = agg::cli::exit_code_for_current_exception();
        std::cerr << "error\tcode=" << code << "\t" << e.what() << "\n";
        return code;
    }
}
