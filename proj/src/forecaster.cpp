#include "mdlab/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mdlab {

ForecastGrid ForecastGrid::lattice(std::size_t n_states, double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("forecast grid: delta outside (0,1]");
    const int ticks = static_cast<int>(std::lround(1.0 / delta));
    ForecastGrid g;
    g.delta = delta;
    for (const auto& comp : compositions(ticks, static_cast<int>(n_states))) {
        Prior p(n_states);
        for (std::size_t i = 0; i < n_states; ++i)
            p[i] = static_cast<double>(comp[i]) / static_cast<double>(ticks);
        g.points.push_back(std::move(p));
    }
    return g;
}

int ForecastGrid::nearest(const Prior& p) const {
    if (points.empty()) throw std::invalid_argument("forecast grid: empty");
    int best = 0;
    double best_d = l1_distance(p, points[0]);
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double d = l1_distance(p, points[i]);
        if (d < best_d) {
            best = static_cast<int>(i);
            best_d = d;
        }
    }
    return best;
}

double quadratic_score(const Prior& forecast, std::size_t outcome) {
    if (outcome >= forecast.size()) throw std::out_of_range("quadratic_score: unknown state index");
    double sq = 0.0;
    for (double x : forecast) sq += x * x;
    return 2.0 * forecast[outcome] - sq;
}

std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& q) {
    const std::size_t n = q.size();
    if (n == 0) throw std::invalid_argument("stationary: empty matrix");
    for (const auto& row : q) {
        if (row.size() != n) throw std::invalid_argument("stationary: matrix not square");
        double s = 0.0;
        for (double x : row) {
            if (!(x >= -1e-12) || !std::isfinite(x))
                throw std::invalid_argument("stationary: negative or non-finite entry");
            s += x;
        }
        if (std::fabs(s - 1.0) > 1e-9)
            throw std::invalid_argument("stationary: row does not sum to 1");
    }

    std::vector<double> p(n, 1.0 / static_cast<double>(n)), next(n);
    for (int iter = 0; iter < 100000; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) next[j] += p[i] * q[i][j];
        double residual = 0.0;
        for (std::size_t j = 0; j < n; ++j) residual += std::fabs(next[j] - p[j]);
        p.swap(next);
        if (residual <= 1e-10) return p;
    }

    // Exact solve of p (Q - I) = 0 with the normalization sum(p) = 1 replacing
    // the last column. Gaussian elimination with partial pivoting.
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t j = 0; j + 1 < n; ++j)
        for (std::size_t i = 0; i < n; ++i) a[j][i] = q[i][j] - (i == j ? 1.0 : 0.0);
    for (std::size_t i = 0; i < n; ++i) a[n - 1][i] = 1.0;
    a[n - 1][n] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        if (std::fabs(a[col][col]) < 1e-14)
            throw std::runtime_error("stationary: singular system in fallback solve");
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t cc = col; cc <= n; ++cc) a[r][cc] -= f * a[col][cc];
        }
    }
    for (std::size_t i = 0; i < n; ++i) p[i] = std::max(0.0, a[i][n] / a[i][i]);
    double s = 0.0;
    for (double x : p) s += x;
    for (double& x : p) x /= s;
    return p;
}

ForecasterState::ForecasterState(double learning_rate, std::size_t n_points,
                                 std::uint64_t rng_seed)
    : eta_(learning_rate), seed_(rng_seed) {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("forecaster: learning rate must be > 0");
    if (n_points == 0) throw std::invalid_argument("forecaster: empty grid");
    weights_.assign(n_points, std::vector<double>(n_points, 1.0));
}

std::vector<double> ForecasterState::play_distribution() const {
    const std::size_t n = weights_.size();
    std::vector<std::vector<double>> q(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (double w : weights_[i]) s += w;
        for (std::size_t j = 0; j < n; ++j) q[i][j] = weights_[i][j] / s;
    }
    return stationary_distribution(q);
}

ForecastDecision ForecasterState::predict(const ForecastGrid& grid) {
    if (weights_.size() != grid.points.size())
        throw std::invalid_argument("forecaster: state built for a different grid");
    ForecastDecision d;
    d.distribution = play_distribution();
    d.sampled = sample_index(d.distribution,
                             unit_draw(seed_, static_cast<std::uint64_t>(round_)));
    predicted_ = true;
    return d;
}

void scaled_weights_update(std::vector<std::vector<double>>& weights,
                           const std::vector<double>& play, const std::vector<double>& loss,
                           double eta) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double scale = play[i];
        if (scale == 0.0) continue;  // zero-probability rows receive zero-scaled loss
        double row_max = 0.0;
        for (std::size_t j = 0; j < weights[i].size(); ++j) {
            weights[i][j] *= std::exp(-eta * scale * loss[j]);
            row_max = std::max(row_max, weights[i][j]);
        }
        for (double& w : weights[i]) w /= row_max;
    }
}

void ForecasterState::update(const ForecastGrid& grid, std::size_t outcome) {
    if (!predicted_) throw std::logic_error("forecaster: update without predict");
    if (outcome >= grid.points[0].size())
        throw std::out_of_range("forecaster: unknown outcome state");
    const std::size_t n = weights_.size();
    std::vector<double> loss(n);
    for (std::size_t j = 0; j < n; ++j) loss[j] = -quadratic_score(grid.points[j], outcome);
    scaled_weights_update(weights_, play_distribution(), loss, eta_);
    ++round_;
    predicted_ = false;
}

double horizon_learning_rate(std::size_t n_points, long horizon) {
    if (horizon < 1) throw std::invalid_argument("learning rate: horizon must be >= 1");
    if (n_points < 2) return 1.0;  // single expert: rate is irrelevant
    return std::sqrt(8.0 * std::log(static_cast<double>(n_points)) /
                     static_cast<double>(horizon));
}

ContextualForecaster::ContextualForecaster(double learning_rate, std::size_t n_points,
                                           std::uint64_t rng_seed)
    : eta_(learning_rate), n_points_(n_points), seed_(rng_seed) {}

ForecasterState& ContextualForecaster::state(const std::vector<int>& context_key) {
    auto it = states_.find(context_key);
    if (it == states_.end())
        it = states_.emplace(context_key, ForecasterState(eta_, n_points_, seed_)).first;
    return it->second;
}

CalibrationReport calibration_report(const std::vector<std::pair<int, int>>& rows,
                                     const ForecastGrid& grid, std::size_t n_states) {
    if (rows.empty()) throw std::invalid_argument("calibration: no rows");
    const long t_total = static_cast<long>(rows.size());
    std::vector<long> counts(grid.points.size(), 0);
    std::vector<std::vector<long>> outcome_counts(grid.points.size(),
                                                  std::vector<long>(n_states, 0));
    for (const auto& [cell, outcome] : rows) {
        if (cell < 0 || cell >= static_cast<int>(grid.points.size()))
            throw std::out_of_range("calibration: grid index out of range");
        if (outcome < 0 || outcome >= static_cast<int>(n_states))
            throw std::out_of_range("calibration: outcome out of range");
        ++counts[static_cast<std::size_t>(cell)];
        ++outcome_counts[static_cast<std::size_t>(cell)][static_cast<std::size_t>(outcome)];
    }

    CalibrationReport rep;
    for (std::size_t f = 0; f < grid.points.size(); ++f) {
        if (counts[f] == 0) continue;
        CalibrationCell cell;
        cell.grid_index = static_cast<int>(f);
        cell.count = counts[f];
        cell.empirical.resize(n_states);
        for (std::size_t y = 0; y < n_states; ++y)
            cell.empirical[y] = static_cast<double>(outcome_counts[f][y]) /
                                static_cast<double>(counts[f]);
        cell.l1 = l1_distance(grid.points[f], cell.empirical);
        rep.iota += static_cast<double>(cell.count) * cell.l1;
        // pi_hat . (S(pi_hat) - S(pi)).
        double gap = 0.0;
        for (std::size_t y = 0; y < n_states; ++y)
            gap += cell.empirical[y] *
                   (quadratic_score(cell.empirical, y) - quadratic_score(grid.points[f], y));
        rep.kappa += static_cast<double>(cell.count) * gap;
        rep.per_cell.push_back(std::move(cell));
    }
    rep.iota /= static_cast<double>(t_total);
    rep.kappa /= static_cast<double>(t_total);
    const double xi = 2.0;
    rep.l12_bound = rep.kappa >= 0.0
                        ? std::sqrt(2.0 * static_cast<double>(n_states) * rep.kappa / xi)
                        : 0.0;
    return rep;
}

std::string CalibrationReport::to_csv() const {
    std::ostringstream out;
    out << "grid_index,count,l1_distance,empirical_probs\n";
    for (const auto& cell : per_cell) {
        out << cell.grid_index << ',' << cell.count << ',' << format_double(cell.l1) << ',';
        for (std::size_t y = 0; y < cell.empirical.size(); ++y) {
            if (y) out << ';';
            out << format_double(cell.empirical[y]);
        }
        out << '\n';
    }
    return out.str();
}

double apriori_miscalibration_bound(std::size_t n_states, std::size_t n_points,
                                    double delta, long horizon) {
    const double f = static_cast<double>(n_points);
    const double y = static_cast<double>(n_states);
    const double t = static_cast<double>(horizon);
    return std::sqrt(y * f * std::sqrt(2.0 * std::log(f) / t) + 2.0 * y * delta);
}

}  // namespace mdlab
