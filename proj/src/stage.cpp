#include "mdlab/stage.hpp"

#include <stdexcept>

#include "mdlab/lp.hpp"

namespace mdlab {

namespace {

RobustValue solve_stage(const Game& game, std::size_t policy, const Prior& prior,
                        double epsilon, LpSense sense) {
    check_prior(game, prior);
    if (!(epsilon >= 0.0)) throw std::invalid_argument("alpha/beta: epsilon must be >= 0");
    if (policy >= game.n_policies()) throw std::invalid_argument("alpha/beta: policy out of range");

    const std::size_t nr = game.n_responses();
    std::vector<double> agent(nr), principal(nr);
    double best = -1.0;
    for (std::size_t r = 0; r < nr; ++r) {
        agent[r] = game.expected_u(r, policy, prior);
        principal[r] = game.expected_v(r, policy, prior);
        if (agent[r] > best) best = agent[r];
    }

    LinearProgram lp;
    lp.objective = principal;
    lp.sense = sense;
    lp.constraints.push_back({std::vector<double>(nr, 1.0), LpRelation::Equal, 1.0});
    lp.constraints.push_back({agent, LpRelation::GreaterEqual, best - epsilon});

    LpSolution sol = solve(lp);
    if (sol.status != LpStatus::Optimal)
        throw std::runtime_error("alpha/beta: LP reported non-optimal status on a feasible program");
    return RobustValue{sol.value, std::move(sol.witness)};
}

}  // namespace

RobustValue alpha(const Game& game, std::size_t policy, const Prior& prior, double epsilon) {
    return solve_stage(game, policy, prior, epsilon, LpSense::Minimize);
}

RobustValue beta(const Game& game, std::size_t policy, const Prior& prior, double epsilon) {
    return solve_stage(game, policy, prior, epsilon, LpSense::Maximize);
}

PolicyChoice robust_policy(const Game& game, const Prior& prior, double epsilon, bool parallel) {
    const std::size_t np = game.n_policies();
    std::vector<RobustValue> values(np);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long p = 0; p < static_cast<long>(np); ++p)
        values[static_cast<std::size_t>(p)] = alpha(game, static_cast<std::size_t>(p), prior, epsilon);
    std::size_t best = 0;
    for (std::size_t p = 1; p < np; ++p)
        if (values[p].value > values[best].value) best = p;
    return PolicyChoice{static_cast<int>(best), std::move(values[best])};
}

double cost_of_robustness(const Game& game, const Prior& prior, double epsilon, bool parallel) {
    const std::size_t np = game.n_policies();
    std::vector<double> betas(np);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long p = 0; p < static_cast<long>(np); ++p)
        betas[static_cast<std::size_t>(p)] = beta(game, static_cast<std::size_t>(p), prior, epsilon).value;
    double best_beta = betas[0];
    for (double x : betas) best_beta = std::max(best_beta, x);
    return best_beta - robust_policy(game, prior, epsilon, parallel).robust.value;
}

}  // namespace mdlab
