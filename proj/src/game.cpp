#include "mdlab/game.hpp"

#include <cmath>
#include <stdexcept>

namespace mdlab {

double Game::expected_u(std::size_t r, std::size_t p, const Prior& prior) const {
    double s = 0.0;
    for (std::size_t y = 0; y < n_states(); ++y) s += prior[y] * u(r, p, y);
    return s;
}

double Game::expected_v(std::size_t r, std::size_t p, const Prior& prior) const {
    double s = 0.0;
    for (std::size_t y = 0; y < n_states(); ++y) s += prior[y] * v(r, p, y);
    return s;
}

namespace {

void check_metric(const std::vector<std::vector<double>>& m, std::size_t n,
                  const char* which) {
    if (m.size() != n) throw std::invalid_argument(std::string(which) + ": metric size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i].size() != n)
            throw std::invalid_argument(std::string(which) + ": metric row size mismatch");
        if (std::fabs(m[i][i]) > 1e-12)
            throw std::invalid_argument(std::string(which) + ": metric nonzero on diagonal");
        for (std::size_t j = 0; j < n; ++j) {
            if (!(m[i][j] >= 0.0) || !std::isfinite(m[i][j]))
                throw std::invalid_argument(std::string(which) + ": metric entry negative or non-finite");
            if (std::fabs(m[i][j] - m[j][i]) > 1e-12)
                throw std::invalid_argument(std::string(which) + ": metric not symmetric");
        }
    }
}

}  // namespace

void Game::validate() const {
    const std::size_t ny = n_states(), nr = n_responses(), np = n_policies();
    if (ny == 0 || nr == 0 || np == 0)
        throw std::invalid_argument("game: empty state/response/policy set");
    if (u_table.size() != nr * np * ny || v_table.size() != nr * np * ny)
        throw std::invalid_argument("game: utility table size mismatch");
    for (double x : u_table)
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("game: U entry outside [0,1]");
    for (double x : v_table)
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("game: V entry outside [0,1]");
    check_metric(response_metric, nr, "game.response_metric");
    check_metric(policy_metric, np, "game.policy_metric");
    if (!(k_u_response >= 0) || !(k_u_policy >= 0) || !(k_v_response >= 0) || !(k_v_policy >= 0))
        throw std::invalid_argument("game: negative Lipschitz constant");
    if (!(delta_response >= 0) || !(delta_policy >= 0))
        throw std::invalid_argument("game: negative cover radius");

    // Exhaustive Lipschitz consistency over both tables.
    const double tol = 1e-9;
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t r = 0; r < nr; ++r)
            for (std::size_t rr = 0; rr < nr; ++rr)
                for (std::size_t p = 0; p < np; ++p)
                    for (std::size_t pp = 0; pp < np; ++pp) {
                        const double du = std::fabs(u(r, p, y) - u(rr, pp, y));
                        const double dv = std::fabs(v(r, p, y) - v(rr, pp, y));
                        const double dr = response_metric[r][rr];
                        const double dp = policy_metric[p][pp];
                        if (du > k_u_response * dr + k_u_policy * dp + tol)
                            throw std::invalid_argument("game: U violates declared Lipschitz constants");
                        if (dv > k_v_response * dr + k_v_policy * dp + tol)
                            throw std::invalid_argument("game: V violates declared Lipschitz constants");
                    }
}

PriorGrid PriorGrid::lattice(std::size_t n_states, double delta) {
    if (n_states == 0) throw std::invalid_argument("prior grid: no states");
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("prior grid: delta outside (0,1]");
    const int ticks = static_cast<int>(std::lround(1.0 / delta));
    PriorGrid grid;
    grid.grid_step = delta;
    for (const auto& comp : compositions(ticks, static_cast<int>(n_states))) {
        Prior p(n_states);
        for (std::size_t i = 0; i < n_states; ++i)
            p[i] = static_cast<double>(comp[i]) / static_cast<double>(ticks);
        grid.points.push_back(std::move(p));
    }
    return grid;
}

int discretize_index(const Prior& point, const PriorGrid& grid) {
    if (grid.points.empty()) throw std::invalid_argument("discretize: empty grid");
    int best = 0;
    double best_d = l1_distance(point, grid.points[0]);
    for (std::size_t i = 1; i < grid.points.size(); ++i) {
        const double d = l1_distance(point, grid.points[i]);
        if (d < best_d) {
            best = static_cast<int>(i);
            best_d = d;
        }
    }
    return best;
}

Prior discretize(const Prior& point, const PriorGrid& grid) {
    return grid.points[static_cast<std::size_t>(discretize_index(point, grid))];
}

BestResponse best_response_value(const Game& game, std::size_t policy, const Prior& prior) {
    check_prior(game, prior);
    BestResponse out;
    std::vector<double> values(game.n_responses());
    for (std::size_t r = 0; r < game.n_responses(); ++r)
        values[r] = game.expected_u(r, policy, prior);
    out.value = values[0];
    for (double x : values) out.value = std::max(out.value, x);
    for (std::size_t r = 0; r < game.n_responses(); ++r)
        if (values[r] >= out.value - 1e-12) out.argmax.push_back(static_cast<int>(r));
    return out;
}

void check_prior(const Game& game, const Prior& prior) {
    if (prior.size() != game.n_states())
        throw std::invalid_argument("prior: dimension mismatch with game states");
    if (!is_distribution(prior, 1e-9))
        throw std::invalid_argument("prior: entries must be a probability distribution");
}

}  // namespace mdlab
