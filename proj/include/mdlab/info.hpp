#pragma once

#include "mdlab/game.hpp"
#include "mdlab/stage.hpp"

namespace mdlab {

/// Signal kernel: column gamma(.|y) is a distribution over signals.
struct InfoStructure {
    std::size_t n_signals = 0;
    std::vector<double> kernel;  // [signal][state]

    double at(std::size_t signal, std::size_t state, std::size_t n_states) const {
        return kernel[signal * n_states + state];
    }
    void validate(std::size_t n_states) const;

    static InfoStructure uninformative(std::size_t n_states);
    static InfoStructure fully_revealing(std::size_t n_states);
};

/// Recommendation form of an information structure: joint mass psi(r, y) with
/// state marginals equal to the prior it was built against.
struct DirectInfoStructure {
    std::size_t n_responses = 0;
    std::size_t n_states = 0;
    std::vector<double> joint;  // [response][state]

    double at(std::size_t r, std::size_t y) const { return joint[r * n_states + y]; }
    void validate(const Prior& prior) const;
};

struct InfoRobustValue {
    double value = 0.0;
    DirectInfoStructure witness;
};

/// alpha with a known signal structure: one response distribution per signal,
/// a single aggregate epsilon budget across signals.
RobustValue alpha_info(const Game& game, std::size_t policy, const Prior& prior,
                       const InfoStructure& gamma, double epsilon);
RobustValue beta_info(const Game& game, std::size_t policy, const Prior& prior,
                      const InfoStructure& gamma, double epsilon);

/// inf over information structures of alpha, solved in recommendation form
/// with per-recommendation obedience slacks.
InfoRobustValue worst_case_alpha(const Game& game, std::size_t policy, const Prior& prior,
                                 double epsilon);
/// sup over information structures of beta (same linearization, maximized).
InfoRobustValue best_case_beta(const Game& game, std::size_t policy, const Prior& prior,
                               double epsilon);

/// argmax over policies of worst_case_alpha; lowest-index tie-break.
PolicyChoice info_robust_policy(const Game& game, const Prior& prior, double epsilon,
                                bool parallel = true);

/// max_p sup_gamma beta minus max_p inf_gamma alpha.
double cost_of_info_robustness(const Game& game, const Prior& prior, double epsilon,
                               bool parallel = true);

/// Empirical information structure of a policy cell: gamma(I,y) =
/// n_I * pi_I(y) / (n_P * pi_P(y)), zero where pi_P(y) = 0.
InfoStructure empirical_info_structure(const std::vector<long>& bin_counts,
                                       const std::vector<Prior>& bin_priors,
                                       long cell_count, const Prior& cell_prior);

}  // namespace mdlab
