#include "qtp/cli.hpp"
#include "qtp/error.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Two-phase quasilinear solver and regularity diagnostics"};
    std::string config_path;
    std::string out_dir;
    bool deterministic = false;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON run config")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_flag("--deterministic", deterministic, "omit wall-clock rows from report.csv");
    app.add_option("--seed", seed, "seed for pair sampling (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    qtp::cli::RunConfig config;
    try {
        config = qtp::cli::load_config(config_path);
    } catch (const qtp::ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const qtp::Error& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 2;
    }
    if (!out_dir.empty()) config.out = out_dir;
    if (seed) config.seed = seed;
    config.deterministic = config.deterministic || deterministic;
    return qtp::cli::run(config, std::cerr);
}
