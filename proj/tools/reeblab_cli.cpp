#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "reeblab/config.hpp"
#include "reeblab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "reeblab: geodesic flows on S^2, their Reeb lifts on S^3 and the "
        "associated orbit, index and section computations"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    unsigned long long seed = 0;
    double tol = -1.0;
    bool seed_given = false, tol_given = false;

    const char* names[] = {"identities", "integrate", "find-orbit",
                           "cz",         "birkhoff",  "scan"};
    const char* descriptions[] = {
        "verify the pullback and Reeb identities on the configured metric",
        "integrate a geodesic or Reeb trajectory and dump it as CSV",
        "locate a closed orbit by Newton shooting and persist its record",
        "locate a closed orbit and require its Conley-Zehnder data",
        "build the Birkhoff annulus section and emit the return-map grid",
        "run the elliptic scan over a metric family"};
    for (int i = 0; i < 6; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
        sub->add_option("--config", config_path, "experiment configuration file")
            ->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "random seed override")
            ->each([&](const std::string&) { seed_given = true; });
        sub->add_option("--tol", tol, "tolerance override")
            ->each([&](const std::string&) { tol_given = true; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const reeblab::ConfigFile file = reeblab::ConfigFile::parse_file(config_path);
        reeblab::ExperimentConfig cfg = reeblab::ExperimentConfig::from_file(file);
        const std::string subcommand = app.get_subcommands().front()->get_name();
        if (cfg.task != subcommand) {
            std::cerr << "validation error: config task '" << cfg.task
                      << "' does not match subcommand '" << subcommand << "'\n";
            return 1;
        }
        if (seed_given) cfg.seed = seed;
        if (tol_given) {
            if (tol <= 0.0) {
                std::cerr << "validation error: --tol must be positive\n";
                return 1;
            }
            cfg.tol = tol;
        }
        return reeblab::run_experiment(cfg, out_dir, std::cout);
    } catch (const reeblab::config_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
