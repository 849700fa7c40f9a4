#include "mdlab/info.hpp"

#include <cmath>
#include <stdexcept>

#include "mdlab/lp.hpp"

namespace mdlab {

void InfoStructure::validate(std::size_t n_states) const {
    if (n_signals == 0) throw std::invalid_argument("info structure: no signals");
    if (kernel.size() != n_signals * n_states)
        throw std::invalid_argument("info structure: kernel size mismatch");
    for (std::size_t y = 0; y < n_states; ++y) {
        double col = 0.0;
        for (std::size_t s = 0; s < n_signals; ++s) {
            const double g = at(s, y, n_states);
            if (!(g >= -1e-12) || !std::isfinite(g))
                throw std::invalid_argument("info structure: negative or non-finite kernel entry");
            col += g;
        }
        if (std::fabs(col - 1.0) > 1e-12)
            throw std::invalid_argument("info structure: kernel column does not sum to 1");
    }
}

InfoStructure InfoStructure::uninformative(std::size_t n_states) {
    InfoStructure g;
    g.n_signals = 1;
    g.kernel.assign(n_states, 1.0);
    return g;
}

InfoStructure InfoStructure::fully_revealing(std::size_t n_states) {
    InfoStructure g;
    g.n_signals = n_states;
    g.kernel.assign(n_states * n_states, 0.0);
    for (std::size_t y = 0; y < n_states; ++y) g.kernel[y * n_states + y] = 1.0;
    return g;
}

void DirectInfoStructure::validate(const Prior& prior) const {
    if (prior.size() != n_states)
        throw std::invalid_argument("direct info structure: prior dimension mismatch");
    if (joint.size() != n_responses * n_states)
        throw std::invalid_argument("direct info structure: joint size mismatch");
    for (std::size_t y = 0; y < n_states; ++y) {
        double mass = 0.0;
        for (std::size_t r = 0; r < n_responses; ++r) {
            if (!(at(r, y) >= -1e-9)) throw std::invalid_argument("direct info structure: negative mass");
            mass += at(r, y);
        }
        if (std::fabs(mass - prior[y]) > 1e-7)
            throw std::invalid_argument("direct info structure: state marginal differs from prior");
    }
}

namespace {

RobustValue solve_info(const Game& game, std::size_t policy, const Prior& prior,
                       const InfoStructure& gamma, double epsilon, LpSense sense) {
    check_prior(game, prior);
    gamma.validate(game.n_states());
    if (!(epsilon >= 0.0)) throw std::invalid_argument("alpha_info/beta_info: epsilon must be >= 0");
    if (policy >= game.n_policies())
        throw std::invalid_argument("alpha_info/beta_info: policy out of range");

    const std::size_t ny = game.n_states();
    const std::size_t nr = game.n_responses();
    const std::size_t ns = gamma.n_signals;

    // Joint weights w(s, r) = sum_y pi(y) gamma(s|y) f(r, policy, y).
    std::vector<double> wu(ns * nr, 0.0), wv(ns * nr, 0.0);
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t r = 0; r < nr; ++r)
            for (std::size_t y = 0; y < ny; ++y) {
                const double m = prior[y] * gamma.at(s, y, ny);
                wu[s * nr + r] += m * game.u(r, policy, y);
                wv[s * nr + r] += m * game.v(r, policy, y);
            }
    double best_total = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
        double b = wu[s * nr];
        for (std::size_t r = 1; r < nr; ++r) b = std::max(b, wu[s * nr + r]);
        best_total += b;
    }

    LinearProgram lp;
    lp.objective = wv;
    lp.sense = sense;
    for (std::size_t s = 0; s < ns; ++s) {
        LpConstraint simplex;
        simplex.coefficients.assign(ns * nr, 0.0);
        for (std::size_t r = 0; r < nr; ++r) simplex.coefficients[s * nr + r] = 1.0;
        simplex.relation = LpRelation::Equal;
        simplex.rhs = 1.0;
        lp.constraints.push_back(std::move(simplex));
    }
    lp.constraints.push_back({wu, LpRelation::GreaterEqual, best_total - epsilon});

    LpSolution sol = solve(lp);
    if (sol.status != LpStatus::Optimal)
        throw std::runtime_error("alpha_info/beta_info: LP reported non-optimal status");
    return RobustValue{sol.value, std::move(sol.witness)};
}

InfoRobustValue solve_direct(const Game& game, std::size_t policy, const Prior& prior,
                             double epsilon, LpSense sense) {
    check_prior(game, prior);
    if (!(epsilon >= 0.0)) throw std::invalid_argument("worst/best case: epsilon must be >= 0");
    if (policy >= game.n_policies())
        throw std::invalid_argument("worst/best case: policy out of range");

    const std::size_t ny = game.n_states();
    const std::size_t nr = game.n_responses();
    const std::size_t n_vars = nr * ny + nr;  // psi(r,y) then z_r

    LinearProgram lp;
    lp.sense = sense;
    lp.objective.assign(n_vars, 0.0);
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t y = 0; y < ny; ++y)
            lp.objective[r * ny + y] = game.v(r, policy, y);

    // State marginals match the prior.
    for (std::size_t y = 0; y < ny; ++y) {
        LpConstraint c;
        c.coefficients.assign(n_vars, 0.0);
        for (std::size_t r = 0; r < nr; ++r) c.coefficients[r * ny + y] = 1.0;
        c.relation = LpRelation::Equal;
        c.rhs = prior[y];
        lp.constraints.push_back(std::move(c));
    }
    // Obedience slack: z_r >= sum_y psi(r,y) (U(r',y) - U(r,y)) for every r'.
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t rr = 0; rr < nr; ++rr) {
            if (rr == r) continue;
            LpConstraint c;
            c.coefficients.assign(n_vars, 0.0);
            for (std::size_t y = 0; y < ny; ++y)
                c.coefficients[r * ny + y] =
                    game.u(rr, policy, y) - game.u(r, policy, y);
            c.coefficients[nr * ny + r] = -1.0;
            c.relation = LpRelation::LessEqual;
            c.rhs = 0.0;
            lp.constraints.push_back(std::move(c));
        }
    // Aggregate budget.
    {
        LpConstraint c;
        c.coefficients.assign(n_vars, 0.0);
        for (std::size_t r = 0; r < nr; ++r) c.coefficients[nr * ny + r] = 1.0;
        c.relation = LpRelation::LessEqual;
        c.rhs = epsilon;
        lp.constraints.push_back(std::move(c));
    }

    LpSolution sol = solve(lp);
    if (sol.status != LpStatus::Optimal)
        throw std::runtime_error("worst/best case: LP reported non-optimal status");

    InfoRobustValue out;
    out.value = sol.value;
    out.witness.n_responses = nr;
    out.witness.n_states = ny;
    out.witness.joint.assign(sol.witness.begin(), sol.witness.begin() + static_cast<long>(nr * ny));
    return out;
}

}  // namespace

RobustValue alpha_info(const Game& game, std::size_t policy, const Prior& prior,
                       const InfoStructure& gamma, double epsilon) {
    return solve_info(game, policy, prior, gamma, epsilon, LpSense::Minimize);
}

RobustValue beta_info(const Game& game, std::size_t policy, const Prior& prior,
                      const InfoStructure& gamma, double epsilon) {
    return solve_info(game, policy, prior, gamma, epsilon, LpSense::Maximize);
}

InfoRobustValue worst_case_alpha(const Game& game, std::size_t policy, const Prior& prior,
                                 double epsilon) {
    return solve_direct(game, policy, prior, epsilon, LpSense::Minimize);
}

InfoRobustValue best_case_beta(const Game& game, std::size_t policy, const Prior& prior,
                               double epsilon) {
    return solve_direct(game, policy, prior, epsilon, LpSense::Maximize);
}

PolicyChoice info_robust_policy(const Game& game, const Prior& prior, double epsilon,
                                bool parallel) {
    const std::size_t np = game.n_policies();
    std::vector<double> values(np);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long p = 0; p < static_cast<long>(np); ++p)
        values[static_cast<std::size_t>(p)] =
            worst_case_alpha(game, static_cast<std::size_t>(p), prior, epsilon).value;
    std::size_t best = 0;
    for (std::size_t p = 1; p < np; ++p)
        if (values[p] > values[best]) best = p;
    PolicyChoice out;
    out.policy = static_cast<int>(best);
    out.robust.value = values[best];
    return out;
}

double cost_of_info_robustness(const Game& game, const Prior& prior, double epsilon,
                               bool parallel) {
    const std::size_t np = game.n_policies();
    std::vector<double> sup_beta(np);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long p = 0; p < static_cast<long>(np); ++p)
        sup_beta[static_cast<std::size_t>(p)] =
            best_case_beta(game, static_cast<std::size_t>(p), prior, epsilon).value;
    double best = sup_beta[0];
    for (double x : sup_beta) best = std::max(best, x);
    return best - info_robust_policy(game, prior, epsilon, parallel).robust.value;
}

InfoStructure empirical_info_structure(const std::vector<long>& bin_counts,
                                       const std::vector<Prior>& bin_priors,
                                       long cell_count, const Prior& cell_prior) {
    if (bin_counts.size() != bin_priors.size())
        throw std::invalid_argument("empirical info structure: size mismatch");
    const std::size_t ny = cell_prior.size();
    InfoStructure g;
    g.n_signals = bin_counts.size();
    g.kernel.assign(g.n_signals * ny, 0.0);
    for (std::size_t i = 0; i < bin_counts.size(); ++i)
        for (std::size_t y = 0; y < ny; ++y) {
            const double denom = static_cast<double>(cell_count) * cell_prior[y];
            g.kernel[i * ny + y] =
                denom > 0.0 ? static_cast<double>(bin_counts[i]) * bin_priors[i][y] / denom : 0.0;
        }
    return g;
}

}  // namespace mdlab
