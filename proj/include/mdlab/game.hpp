#pragma once

#include <string>
#include <vector>

#include "mdlab/common.hpp"

namespace mdlab {

/// Finite stage game. Continuous response/policy spaces are represented by
/// their finite covers; the metrics and cover radii are carried so the bound
/// calculators can charge discretization error.
class Game {
public:
    std::vector<std::string> state_names;
    std::vector<std::string> response_names;
    std::vector<std::string> policy_names;

    // Utility tables indexed [response][policy][state], entries in [0,1].
    std::vector<double> u_table;
    std::vector<double> v_table;

    std::vector<std::vector<double>> response_metric;
    std::vector<std::vector<double>> policy_metric;

    double k_u_response = 1.0;
    double k_u_policy = 1.0;
    double k_v_response = 1.0;
    double k_v_policy = 1.0;
    double delta_response = 0.0;
    double delta_policy = 0.0;

    std::size_t n_states() const { return state_names.size(); }
    std::size_t n_responses() const { return response_names.size(); }
    std::size_t n_policies() const { return policy_names.size(); }

    double u(std::size_t r, std::size_t p, std::size_t y) const {
        return u_table[(r * n_policies() + p) * n_states() + y];
    }
    double v(std::size_t r, std::size_t p, std::size_t y) const {
        return v_table[(r * n_policies() + p) * n_states() + y];
    }

    double expected_u(std::size_t r, std::size_t p, const Prior& prior) const;
    double expected_v(std::size_t r, std::size_t p, const Prior& prior) const;

    /// Checks ranges, metric axioms and the declared Lipschitz constants
    /// exhaustively; throws std::invalid_argument on the first violation.
    void validate() const;
};

/// Finite cover of the prior simplex under the l1 metric.
struct PriorGrid {
    double grid_step = 0.0;
    std::vector<Prior> points;

    /// Uniform lattice with coordinate step `delta`, one point per cell.
    static PriorGrid lattice(std::size_t n_states, double delta);
};

struct BestResponse {
    double value = 0.0;
    std::vector<int> argmax;  // every maximizer within 1e-12
};

/// Index of the grid point at minimal l1 distance; ties break to the lowest
/// grid index.
int discretize_index(const Prior& point, const PriorGrid& grid);
Prior discretize(const Prior& point, const PriorGrid& grid);

/// max_r E_{y~prior} U(r, policy, y) together with the full argmax set.
BestResponse best_response_value(const Game& game, std::size_t policy, const Prior& prior);

void check_prior(const Game& game, const Prior& prior);

}  // namespace mdlab
