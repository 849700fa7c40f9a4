#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mdlab/config.hpp"
#include "mdlab/engine.hpp"

namespace mdlab {

struct ReportRow {
    int run_id = 0;
    std::uint64_t seed = 0;
    long checkpoint = 0;
    double pr = 0.0, er = 0.0, ir = 0.0, cir = 0.0, fer = 0.0, fcir = 0.0;
    double iota = 0.0, kappa = 0.0, l12_bound = 0.0, e4_bound = 0.0;
    long cir_bins = 0, fcir_bins = 0;
    bool assumption_verified = false;
};

struct BoundRow {
    int run_id = 0;
    std::uint64_t seed = 0;
    long checkpoint = 0;
    std::string theorem;
    BoundResult bound;
    double pr = 0.0;
    bool asserted = false;
    bool holds = false;
};

struct ExperimentResult {
    std::vector<Transcript> transcripts;  // one per seed, seed order
    std::vector<ReportRow> report;
    std::vector<BoundRow> bounds;
    std::vector<std::string> assertion_failures;
};

/// Runs all (seed x checkpoint) evaluations; seeds execute concurrently up to
/// `jobs` threads and results merge in seed order, so the output is identical
/// for any job count.
ExperimentResult execute_experiment(const Game& game, const ExperimentConfig& config,
                                    int jobs = 1);

std::string transcript_csv(const Game& game, const std::vector<Transcript>& transcripts);
std::string report_csv(const std::vector<ReportRow>& rows);
std::string bounds_csv(const std::vector<BoundRow>& rows);
json summary_json(const ExperimentConfig& config, const ExperimentResult& result);

/// `run --config <path> --out <dir>`: writes transcript.csv, report.csv,
/// bounds.csv and summary.json. Exit 0 on success, 2 on config error, 3 on
/// assertion failure in strict mode.
int cli_run(const std::string& config_path, const std::string& out_dir, int jobs, bool strict,
            std::ostream& out, std::ostream& err);

/// `solve --game <path|builtin> --prior <csv> --epsilon <f> --mode <m>`.
int cli_solve(const std::string& game_ref, const std::string& prior_csv, double epsilon,
              const std::string& mode, int policy, std::ostream& out, std::ostream& err);

struct ImpossibilityRun {
    int target_policy = 0;
    int bait_policy = 0;
    double external_regret = 0.0;
    std::vector<std::pair<long, double>> pr_at_checkpoints;
};

struct ImpossibilityResult {
    std::vector<ImpossibilityRun> runs;
    double min_pr_final = 0.0;
};

/// Builds the selective-learner construction on the judge-prosecutor game and
/// runs each constant mechanism against the learner instance that straddles
/// its trigger.
ImpossibilityResult impossibility_scenario(const std::string& scenario, long horizon,
                                           std::uint64_t seed);

int cli_impossibility(const std::string& scenario, long horizon, std::uint64_t seed,
                      std::ostream& out, std::ostream& err);

}  // namespace mdlab
