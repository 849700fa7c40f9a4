#pragma once

#include "mdlab/game.hpp"

namespace mdlab {

struct RobustValue {
    double value = 0.0;
    std::vector<double> witness;  // adversarial distribution over responses
};

struct PolicyChoice {
    int policy = 0;
    RobustValue robust;
};

/// Worst-case principal utility over response distributions whose expected
/// agent utility is within epsilon of the best response.
RobustValue alpha(const Game& game, std::size_t policy, const Prior& prior, double epsilon);

/// Best-case analogue of alpha.
RobustValue beta(const Game& game, std::size_t policy, const Prior& prior, double epsilon);

/// argmax over the policy cover of alpha; ties break to the lowest index.
PolicyChoice robust_policy(const Game& game, const Prior& prior, double epsilon,
                           bool parallel = true);

/// max_p beta minus alpha at the robust policy.
double cost_of_robustness(const Game& game, const Prior& prior, double epsilon,
                          bool parallel = true);

}  // namespace mdlab
