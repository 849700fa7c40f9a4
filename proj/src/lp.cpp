#include "mdlab/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace mdlab {

namespace {

constexpr double kPivotTol = 1e-11;

// One substitution record per original variable, mapping the standardized
// variables back: x = sign * xhat[index] (+ xhat[neg_index] for free vars) + shift.
struct VarMap {
    int index = -1;      // column of the standardized variable
    int neg_index = -1;  // second column when the variable is free (x+ - x-)
    double shift = 0.0;
    double sign = 1.0;
};

struct Standardized {
    std::vector<std::vector<double>> rows;  // equality rows over xhat >= 0
    std::vector<double> rhs;
    std::vector<double> cost;  // minimization objective over xhat
    double cost_shift = 0.0;
    std::vector<VarMap> var_map;
    std::size_t n_vars = 0;
};

void validate(const LinearProgram& lp) {
    const std::size_t n = lp.objective.size();
    if (n == 0) throw std::invalid_argument("lp: empty objective");
    for (double c : lp.objective)
        if (!std::isfinite(c)) throw std::domain_error("lp: non-finite objective coefficient");
    if (!lp.variable_bounds.empty() && lp.variable_bounds.size() != n)
        throw std::invalid_argument("lp: variable_bounds size mismatch");
    for (const auto& row : lp.constraints) {
        if (row.coefficients.size() != n)
            throw std::invalid_argument("lp: ragged constraint row");
        for (double a : row.coefficients)
            if (!std::isfinite(a)) throw std::domain_error("lp: non-finite constraint coefficient");
        if (!std::isfinite(row.rhs)) throw std::domain_error("lp: non-finite rhs");
    }
    for (const auto& b : lp.variable_bounds) {
        if (std::isnan(b.lower) || std::isnan(b.upper) || b.lower > b.upper)
            throw std::invalid_argument("lp: invalid variable bounds");
    }
}

Standardized standardize(const LinearProgram& lp) {
    const std::size_t n = lp.objective.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<LpBounds> bounds = lp.variable_bounds;
    if (bounds.empty()) bounds.assign(n, LpBounds{});

    Standardized st;
    st.var_map.resize(n);

    // Column layout for the standardized variables.
    std::size_t cols = 0;
    for (std::size_t j = 0; j < n; ++j) {
        VarMap& vm = st.var_map[j];
        if (bounds[j].lower > -inf) {
            vm.index = static_cast<int>(cols++);
            vm.shift = bounds[j].lower;
            vm.sign = 1.0;
        } else if (bounds[j].upper < inf) {
            vm.index = static_cast<int>(cols++);
            vm.shift = bounds[j].upper;
            vm.sign = -1.0;
        } else {
            vm.index = static_cast<int>(cols++);
            vm.neg_index = static_cast<int>(cols++);
        }
    }

    // Rows: user constraints, then residual upper bounds.
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<LpRelation> rels;
    for (const auto& c : lp.constraints) {
        std::vector<double> row(cols, 0.0);
        double b = c.rhs;
        for (std::size_t j = 0; j < n; ++j) {
            const VarMap& vm = st.var_map[j];
            const double a = c.coefficients[j];
            if (a == 0.0) continue;
            row[static_cast<std::size_t>(vm.index)] += a * vm.sign;
            if (vm.neg_index >= 0) row[static_cast<std::size_t>(vm.neg_index)] -= a;
            b -= a * vm.shift;
        }
        rows.push_back(std::move(row));
        rhs.push_back(b);
        rels.push_back(c.relation);
    }
    for (std::size_t j = 0; j < n; ++j) {
        const VarMap& vm = st.var_map[j];
        if (vm.neg_index >= 0) continue;  // free variable, no residual bound
        const double lo = bounds[j].lower, hi = bounds[j].upper;
        if (lo > -inf && hi < inf) {
            if (hi > lo) {
                std::vector<double> row(cols, 0.0);
                row[static_cast<std::size_t>(vm.index)] = 1.0;
                rows.push_back(std::move(row));
                rhs.push_back(hi - lo);
                rels.push_back(LpRelation::LessEqual);
            } else {
                // fixed variable: xhat = 0
                std::vector<double> row(cols, 0.0);
                row[static_cast<std::size_t>(vm.index)] = 1.0;
                rows.push_back(std::move(row));
                rhs.push_back(0.0);
                rels.push_back(LpRelation::Equal);
            }
        }
    }

    // Slack / surplus columns turn everything into equalities.
    std::size_t slack_count = 0;
    for (auto rel : rels)
        if (rel != LpRelation::Equal) ++slack_count;
    const std::size_t total = cols + slack_count;
    std::size_t next_slack = cols;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].resize(total, 0.0);
        if (rels[i] == LpRelation::LessEqual)
            rows[i][next_slack++] = 1.0;
        else if (rels[i] == LpRelation::GreaterEqual)
            rows[i][next_slack++] = -1.0;
        if (rhs[i] < 0.0) {
            for (double& a : rows[i]) a = -a;
            rhs[i] = -rhs[i];
        }
    }

    // Minimization cost over standardized variables.
    st.cost.assign(total, 0.0);
    const double sense = (lp.sense == LpSense::Minimize) ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n; ++j) {
        const VarMap& vm = st.var_map[j];
        const double c = sense * lp.objective[j];
        st.cost[static_cast<std::size_t>(vm.index)] += c * vm.sign;
        if (vm.neg_index >= 0) st.cost[static_cast<std::size_t>(vm.neg_index)] -= c;
        st.cost_shift += c * vm.shift;
    }

    st.rows = std::move(rows);
    st.rhs = std::move(rhs);
    st.n_vars = total;
    return st;
}

// Canonical tableau over columns [structural+slack | artificial | rhs].
struct Tableau {
    std::size_t m, n;  // rows, non-artificial columns
    std::vector<std::vector<double>> t;
    std::vector<int> basis;  // basis[i] = column index

    double& rhs(std::size_t i) { return t[i][n + m]; }

    void pivot(std::size_t row, std::size_t col) {
        const double piv = t[row][col];
        for (double& a : t[row]) a /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = t[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n + m; ++j) t[i][j] -= f * t[row][j];
        }
        basis[row] = static_cast<int>(col);
    }

    // Bland's rule: enter the lowest-index improving column, leave on the
    // lowest-index basic variable among minimum-ratio ties.
    bool simplex(const std::vector<double>& cost, bool allow_artificial, bool& unbounded) {
        unbounded = false;
        while (true) {
            int enter = -1;
            const std::size_t limit = allow_artificial ? n + m : n;
            for (std::size_t j = 0; j < limit; ++j) {
                double r = cost[j];
                for (std::size_t i = 0; i < m; ++i) {
                    const int bj = basis[i];
                    if (cost[static_cast<std::size_t>(bj)] != 0.0)
                        r -= cost[static_cast<std::size_t>(bj)] * t[i][j];
                }
                if (r < -kLpFeasTol) {
                    enter = static_cast<int>(j);
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            double best_ratio = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double a = t[i][static_cast<std::size_t>(enter)];
                if (a > kPivotTol) {
                    const double ratio = rhs(i) / a;
                    if (leave < 0 || ratio < best_ratio - kPivotTol ||
                        (std::fabs(ratio - best_ratio) <= kPivotTol &&
                         basis[i] < basis[static_cast<std::size_t>(leave)])) {
                        leave = static_cast<int>(i);
                        best_ratio = ratio;
                    }
                }
            }
            if (leave < 0) {
                unbounded = true;
                return false;
            }
            pivot(static_cast<std::size_t>(leave), static_cast<std::size_t>(enter));
        }
    }
};

}  // namespace

LpSolution solve(const LinearProgram& lp) {
    validate(lp);
    Standardized st = standardize(lp);
    const std::size_t m = st.rows.size();
    const std::size_t n = st.n_vars;

    Tableau tb;
    tb.m = m;
    tb.n = n;
    tb.basis.resize(m);
    tb.t.assign(m, std::vector<double>(n + m + 1, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) tb.t[i][j] = st.rows[i][j];
        tb.t[i][n + i] = 1.0;
        tb.t[i][n + m] = st.rhs[i];
        tb.basis[i] = static_cast<int>(n + i);
    }

    LpSolution sol;

    if (m > 0) {
        // Phase 1: drive the artificial variables to zero.
        std::vector<double> phase1(n + m, 0.0);
        for (std::size_t j = n; j < n + m; ++j) phase1[j] = 1.0;
        bool unbounded = false;
        tb.simplex(phase1, true, unbounded);
        double infeas = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (tb.basis[i] >= static_cast<int>(n)) infeas += tb.rhs(i);
        if (infeas > kLpFeasTol) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        // Pivot out any artificial still basic at zero level.
        for (std::size_t i = 0; i < m; ++i) {
            if (tb.basis[i] < static_cast<int>(n)) continue;
            std::size_t col = 0;
            for (; col < n; ++col)
                if (std::fabs(tb.t[i][col]) > kPivotTol) break;
            if (col < n) tb.pivot(i, col);
            // Otherwise the row is redundant; the artificial stays basic at
            // zero and can never re-enter phase 2 (entering is capped at n).
        }
    }

    // Phase 2.
    std::vector<double> phase2(n + m, 0.0);
    for (std::size_t j = 0; j < n; ++j) phase2[j] = st.cost[j];
    bool unbounded = false;
    tb.simplex(phase2, false, unbounded);
    if (unbounded) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    std::vector<double> xhat(n, 0.0);
    double value = st.cost_shift;
    for (std::size_t i = 0; i < m; ++i)
        if (tb.basis[i] < static_cast<int>(n))
            xhat[static_cast<std::size_t>(tb.basis[i])] = tb.rhs(i);
    for (std::size_t j = 0; j < n; ++j) value += st.cost[j] * xhat[j];

    sol.status = LpStatus::Optimal;
    sol.value = (lp.sense == LpSense::Minimize) ? value : -value;
    sol.witness.resize(lp.objective.size());
    for (std::size_t j = 0; j < lp.objective.size(); ++j) {
        const VarMap& vm = st.var_map[j];
        double x = vm.sign * xhat[static_cast<std::size_t>(vm.index)] + vm.shift;
        if (vm.neg_index >= 0) x -= xhat[static_cast<std::size_t>(vm.neg_index)];
        sol.witness[j] = x;
    }
    return sol;
}

}  // namespace mdlab
