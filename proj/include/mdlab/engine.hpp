#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mdlab/forecaster.hpp"
#include "mdlab/game.hpp"
#include "mdlab/info.hpp"
#include "mdlab/learners.hpp"
#include "mdlab/mechanisms.hpp"

namespace mdlab {

struct TranscriptRow {
    int state = 0;
    int forecast_cell = 0;
    int cf_forecast_cell = 0;  // forecast the constant counterfactual mechanisms publish
    int policy = 0;
    int response = 0;
    std::vector<double> response_dist;
    double u_expected = 0.0, v_expected = 0.0;
    double u_realized = 0.0, v_realized = 0.0;
    std::vector<int> cf_responses;                     // one per alternative
    std::vector<std::vector<double>> cf_dists;         // one per alternative
    std::vector<double> cf_u_expected, cf_v_expected;  // one per alternative
    std::vector<int> oracle_context;  // response cells over the cover (M1 runs)
    int cir_bin = 0;   // (policy cell, realized cell, counterfactual cells)
    int fcir_bin = 0;  // (forecast cell, realized cell, counterfactual cells)
};

struct Transcript {
    const Game* game = nullptr;
    MechanismSpec mechanism;
    LearnerSpec learner;
    std::vector<int> alternatives;
    ForecastGrid grid;
    std::uint64_t master_seed = 0;
    std::vector<TranscriptRow> rows;
    std::vector<std::vector<int>> cir_bin_keys;
    std::vector<std::vector<int>> fcir_bin_keys;

    long horizon() const { return static_cast<long>(rows.size()); }
    const Prior& forecast_point(int cell) const {
        return grid.points[static_cast<std::size_t>(cell)];
    }
};

/// Executes the repeated game: one realized world plus one parallel seeded
/// clone per alternative policy, fed the same states and common random
/// numbers. Deterministic given master_seed. The optional response override
/// exists for the nonresponsiveness test: it replaces the realized sampled
/// responses without touching any other world.
Transcript run(const Game& game, const MechanismSpec& mechanism_spec,
               const LearnerSpec& learner_spec, const std::vector<int>& states,
               std::uint64_t master_seed,
               const std::vector<int>* response_override = nullptr);

enum class RegretNotion { External, Internal, Counterfactual, ForecastExternal, ForecastCounterfactual };

struct RegretBinRow {
    int bin = 0;
    long count = 0;
    double epsilon = 0.0;  // best-in-hindsight gap within the bin
    Prior empirical;
};

struct RegretResult {
    double value = 0.0;
    std::vector<RegretBinRow> bins;
};

/// Agent regret over the first `upto` rounds. world < 0 is the realized run;
/// otherwise an index into the alternatives. Achieved utility is the exact
/// expectation under the recorded response distributions.
RegretResult agent_regret(const Transcript& t, RegretNotion notion, long upto, int world = -1);

/// Definition-D3 regret against the best alternative policy, in exact
/// expectations.
double principal_regret(const Transcript& t, long upto);

struct EmpiricalPolicyCell {
    int policy = 0;
    long count = 0;
    Prior empirical;
    std::vector<int> bins;
    std::vector<long> bin_counts;
    std::vector<Prior> bin_empiricals;
    InfoStructure gamma;  // empirical structure over the cell's bins
};

std::vector<EmpiricalPolicyCell> empirical_structures(const Transcript& t, long upto);

enum class TheoremBound { T4, T5, T6 };

struct BoundParams {
    std::optional<double> epsilon;        // agent regret bound; measured FCIR when absent
    std::optional<double> epsilon_tilde;  // ER floor; measured FER floor when absent
    std::optional<double> m1;             // alignment constants; required by the T5 form
    std::optional<double> m2;
};

struct BoundResult {
    double base_term = 0.0;  // count-weighted Delta or Nabla sum
    double iota_measured = 0.0;
    double iota_apriori = 0.0;
    double epsilon_used = 0.0;
    double epsilon_tilde_used = 0.0;
    double m1 = 0.0, m2 = 0.0;
    double bound_measured = 0.0;
    double bound_apriori = 0.0;
};

/// Explicit-constant right-hand sides. T4 aggregates over the forecastwise
/// information bins, T5/T6 over forecast cells; reported with both the
/// measured miscalibration and the a-priori bound in its place.
BoundResult theorem_bound(const Transcript& t, TheoremBound which, const BoundParams& params,
                          long upto);

/// Realized miscalibration against the conditioning the theorems use.
double measured_iota(const Transcript& t, long upto, bool forecastwise_bins);

/// Largest FCIR across the realized world and every counterfactual world:
/// the tightest epsilon the bounded-regret assumption admits on this path.
double measured_epsilon(const Transcript& t, long upto);
/// Largest FER shortfall below zero across worlds.
double measured_epsilon_tilde(const Transcript& t, long upto);

}  // namespace mdlab
