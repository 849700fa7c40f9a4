#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "mdlab/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"prior-free online mechanism design simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int jobs = 1;
    bool strict = false;
    CLI::App* run_cmd = app.add_subcommand("run", "execute an experiment config");
    run_cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    run_cmd->add_option("--out", out_dir, "output directory")->required();
    run_cmd->add_option("--jobs", jobs, "concurrent runs");
    run_cmd->add_flag("--strict", strict, "exit 3 when a run-level assertion fails");

    std::string game_ref, prior_csv, mode;
    double epsilon = 0.0;
    int policy = -1;
    CLI::App* solve_cmd = app.add_subcommand("solve", "stage-game solvers");
    solve_cmd->add_option("--game", game_ref, "game file or builtin name")->required();
    solve_cmd->add_option("--prior", prior_csv, "comma-separated prior")->required();
    solve_cmd->add_option("--epsilon", epsilon, "robustness parameter")->required();
    solve_cmd->add_option("--mode", mode, "robust|info-robust|alpha|beta|nabla|delta")->required();
    solve_cmd->add_option("--policy", policy, "policy index for alpha/beta");

    std::string scenario;
    long horizon = 2000;
    std::uint64_t seed = 1;
    CLI::App* imp_cmd = app.add_subcommand("impossibility", "non-vanishing regret constructions");
    imp_cmd->add_option("--scenario", scenario, "prop1|prop2")->required();
    imp_cmd->add_option("--T", horizon, "horizon (>= 100)");
    imp_cmd->add_option("--seed", seed, "scenario seed");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed())
        return mdlab::cli_run(config_path, out_dir, jobs, strict, std::cout, std::cerr);
    if (solve_cmd->parsed())
        return mdlab::cli_solve(game_ref, prior_csv, epsilon, mode, policy, std::cout, std::cerr);
    return mdlab::cli_impossibility(scenario, horizon, seed, std::cout, std::cerr);
}
