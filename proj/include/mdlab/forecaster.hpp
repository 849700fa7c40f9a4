#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "mdlab/common.hpp"

namespace mdlab {

/// Finite set of representative forecasts, one per cell of the forecast
/// partition; coordinate step delta.
struct ForecastGrid {
    double delta = 0.0;
    std::vector<Prior> points;

    static ForecastGrid lattice(std::size_t n_states, double delta);
    int nearest(const Prior& p) const;  // lowest-index l1 argmin
};

/// S_y(pi) = 2 pi(y) - sum pi^2. Proper; the optimal expected score is
/// 2-strongly convex, which is what the calibration bound leans on.
double quadratic_score(const Prior& forecast, std::size_t outcome);

/// pi with ||pi Q - pi||_1 <= 1e-10 via power iteration from uniform, exact
/// linear solve as fallback. Throws on non-stochastic rows.
std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& q);

/// One step of the per-source reduction: row i of `weights` absorbs the loss
/// vector scaled by the probability that i was played. A zero-probability row
/// is left untouched.
void scaled_weights_update(std::vector<std::vector<double>>& weights,
                           const std::vector<double>& play, const std::vector<double>& loss,
                           double eta);

struct ForecastDecision {
    std::vector<double> distribution;  // over grid points
    int sampled = 0;                   // grid index actually forecast
};

/// Internal-regret forecaster: one exponential-weights subalgorithm per grid
/// point; the played distribution is the stationary distribution of the
/// row-stochastic matrix the subalgorithms emit. Losses are the negated
/// quadratic score scaled by the played probability of the source point.
class ForecasterState {
public:
    ForecasterState() = default;
    ForecasterState(double learning_rate, std::size_t n_points, std::uint64_t rng_seed);

    ForecastDecision predict(const ForecastGrid& grid);
    void update(const ForecastGrid& grid, std::size_t outcome);

    int round() const { return round_; }
    double learning_rate() const { return eta_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<std::vector<double>>& weights() const { return weights_; }

private:
    std::vector<double> play_distribution() const;

    double eta_ = 0.0;
    std::uint64_t seed_ = 0;
    int round_ = 0;
    bool predicted_ = false;
    std::vector<std::vector<double>> weights_;  // [source][target]
};

/// Horizon-tuned learning rate, sqrt(8 log |grid| / T).
double horizon_learning_rate(std::size_t n_points, long horizon);

/// Per-context forecaster states, created fresh on first use. All contexts
/// share one sampling stream so a constant context reproduces the
/// context-free forecaster exactly.
class ContextualForecaster {
public:
    ContextualForecaster() = default;
    ContextualForecaster(double learning_rate, std::size_t n_points, std::uint64_t rng_seed);

    ForecasterState& state(const std::vector<int>& context_key);
    std::size_t context_count() const { return states_.size(); }

private:
    double eta_ = 0.0;
    std::size_t n_points_ = 0;
    std::uint64_t seed_ = 0;
    std::map<std::vector<int>, ForecasterState> states_;
};

struct CalibrationCell {
    int grid_index = 0;
    long count = 0;
    Prior empirical;
    double l1 = 0.0;
};

struct CalibrationReport {
    double kappa = 0.0;      // realized average scoring regret
    double iota = 0.0;       // realized miscalibration
    double l12_bound = 0.0;  // sqrt(2 |Y| kappa / xi), xi = 2
    std::vector<CalibrationCell> per_cell;

    std::string to_csv() const;
};

CalibrationReport calibration_report(const std::vector<std::pair<int, int>>& rows,
                                     const ForecastGrid& grid, std::size_t n_states);

/// A-priori miscalibration bound: sqrt(|Y| |F| sqrt(2 log|F| / T) + 2 |Y| delta).
double apriori_miscalibration_bound(std::size_t n_states, std::size_t n_points,
                                    double delta, long horizon);

}  // namespace mdlab
