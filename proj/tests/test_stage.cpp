#include <doctest.h>

#include <cmath>

#include "mdlab/grid_oracle.hpp"
#include "mdlab/scenarios.hpp"
#include "mdlab/stage.hpp"

using namespace mdlab;

namespace {

const Prior kThird = {1.0 / 3.0, 2.0 / 3.0};

Game random_game(std::uint64_t seed, std::size_t ny, std::size_t nr, std::size_t np) {
    Game g;
    std::uint64_t c = 0;
    auto draw = [&]() { return unit_draw(seed, c++); };
    for (std::size_t i = 0; i < ny; ++i) g.state_names.push_back("y" + std::to_string(i));
    for (std::size_t i = 0; i < nr; ++i) g.response_names.push_back("r" + std::to_string(i));
    for (std::size_t i = 0; i < np; ++i) g.policy_names.push_back("p" + std::to_string(i));
    for (std::size_t i = 0; i < nr * np * ny; ++i) g.u_table.push_back(draw());
    for (std::size_t i = 0; i < nr * np * ny; ++i) g.v_table.push_back(draw());
    g.response_metric.assign(nr, std::vector<double>(nr, 1.0));
    for (std::size_t r = 0; r < nr; ++r) g.response_metric[r][r] = 0.0;
    g.policy_metric.assign(np, std::vector<double>(np, 1.0));
    for (std::size_t p = 0; p < np; ++p) g.policy_metric[p][p] = 0.0;
    g.k_u_response = g.k_u_policy = g.k_v_response = g.k_v_policy = 1.0;
    g.validate();
    return g;
}

Prior random_prior(std::uint64_t seed, std::size_t n) {
    Prior p(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = 0.05 + unit_draw(seed, 100 + i);
        s += p[i];
    }
    for (double& x : p) x /= s;
    return p;
}

// Independent route to alpha/beta: exhaustive search over the response
// simplex at the given step.
OracleResult mu_oracle(const Game& g, std::size_t policy, const Prior& prior, double epsilon,
                       OracleSense sense, double step) {
    std::vector<double> eu(g.n_responses()), ev(g.n_responses());
    double best = -1.0;
    for (std::size_t r = 0; r < g.n_responses(); ++r) {
        eu[r] = g.expected_u(r, policy, prior);
        ev[r] = g.expected_v(r, policy, prior);
        best = std::max(best, eu[r]);
    }
    auto obj = [&](const std::vector<double>& mu) {
        double s = 0.0;
        for (std::size_t r = 0; r < mu.size(); ++r) s += mu[r] * ev[r];
        return s;
    };
    auto feas = [&](const std::vector<double>& mu) {
        double s = 0.0;
        for (std::size_t r = 0; r < mu.size(); ++r) s += mu[r] * eu[r];
        return s >= best - epsilon - 1e-12;
    };
    return grid_oracle(obj, feas, static_cast<int>(g.n_responses()), step, sense);
}

}  // namespace

TEST_CASE("persuasion anchors at epsilon zero") {
    Game jp = judge_prosecutor(0.05);
    // Full transparency: the judge strictly prefers following the message,
    // so the prosecutor convicts exactly the guilty third.
    CHECK(alpha(jp, 0, kThird, 0.0).value == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(beta(jp, 0, kThird, 0.0).value == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    // The optimal signal leaves the judge indifferent after the convict
    // message: best case 2/3, worst case 0.
    CHECK(beta(jp, 10, kThird, 0.0).value == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(alpha(jp, 10, kThird, 0.0).value == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("indifferent-judge worst case agrees with the mu grid oracle at 1e-3") {
    Game jp = judge_prosecutor(0.05);
    OracleResult o = mu_oracle(jp, 10, kThird, 0.0, OracleSense::Minimize, 1e-3);
    REQUIRE(o.feasible);
    CHECK(std::fabs(alpha(jp, 10, kThird, 0.0).value - o.value) <= 4e-3);
}

TEST_CASE("vacuous budget reduces to per-response extremes") {
    Game g = random_game(3, 3, 4, 2);
    Prior p = random_prior(5, 3);
    double lo = 1.0, hi = 0.0;
    for (std::size_t r = 0; r < g.n_responses(); ++r) {
        lo = std::min(lo, g.expected_v(r, 0, p));
        hi = std::max(hi, g.expected_v(r, 0, p));
    }
    CHECK(alpha(g, 0, p, 1.0).value == doctest::Approx(lo).epsilon(1e-9));
    CHECK(beta(g, 0, p, 1.0).value == doctest::Approx(hi).epsilon(1e-9));
}

TEST_CASE("random small games agree with the grid oracle") {
    for (std::uint64_t seed = 200; seed < 212; ++seed) {
        Game g = random_game(seed, 2, 2 + seed % 2, 1 + seed % 3);
        Prior p = random_prior(seed * 3 + 1, 2);
        const double eps = 0.1 + 0.5 * unit_draw(seed, 77);
        for (std::size_t pol = 0; pol < g.n_policies(); ++pol) {
            OracleResult lo = mu_oracle(g, pol, p, eps, OracleSense::Minimize, 1e-3);
            OracleResult hi = mu_oracle(g, pol, p, eps, OracleSense::Maximize, 1e-3);
            CHECK(std::fabs(alpha(g, pol, p, eps).value - lo.value) <= 2e-3);
            CHECK(std::fabs(beta(g, pol, p, eps).value - hi.value) <= 2e-3);
        }
    }
}

TEST_CASE("robust policy on the persuasion grid") {
    Game jp = judge_prosecutor(0.05);
    PolicyChoice pc = robust_policy(jp, kThird, 0.1);
    // Derived by the mu grid oracle: the worst case collapses at the point
    // where following beats acquitting by exactly the budget, so the argmax
    // sits well below that threshold.
    CHECK(pc.policy == 2);  // convict-if-innocent probability 0.10
    CHECK(pc.robust.value == doctest::Approx(0.25).epsilon(1e-9));
    // Oracle agreement across the whole cover at step 0.01.
    for (std::size_t p = 0; p < jp.n_policies(); ++p) {
        OracleResult o = mu_oracle(jp, p, kThird, 0.1, OracleSense::Minimize, 0.01);
        CHECK(std::fabs(alpha(jp, p, kThird, 0.1).value - o.value) <= 1.0 * 0.01 * 4);
    }

    // Point mass on the guilty state: no uncertainty, alpha meets beta.
    const Prior certain = {1.0, 0.0};
    PolicyChoice sure = robust_policy(jp, certain, 0.0);
    CHECK(sure.robust.value ==
          doctest::Approx(beta(jp, static_cast<std::size_t>(sure.policy), certain, 0.0).value));
}

TEST_CASE("robust contract policy") {
    Game ct = contract_task({});
    // Spec parameter point: moderate probability 0.5. The cheapest
    // work-inducing payment exceeds the benefit of success, so the worst-case
    // optimal contract pays nothing (derived by the mu grid oracle).
    const Prior half = {0.25, 0.5, 0.25};
    PolicyChoice pc = robust_policy(ct, half, 0.1);
    CHECK(pc.policy == 0);
    OracleResult o = mu_oracle(ct, 0, half, 0.1, OracleSense::Minimize, 1e-3);
    CHECK(std::fabs(pc.robust.value - o.value) <= 2e-3);

    // When the moderate state dominates, paying for effort becomes worst-case
    // optimal; frozen from the oracle sweep over the payment grid.
    const Prior mostly_moderate = {0.1, 0.8, 0.1};
    PolicyChoice pay = robust_policy(ct, mostly_moderate, 0.02);
    CHECK(pay.policy == 8);  // pay_success 1.6
    CHECK(pay.robust.value == doctest::Approx(0.707619048).epsilon(1e-6));
    for (std::size_t p = 0; p < ct.n_policies(); ++p) {
        OracleResult op = mu_oracle(ct, p, mostly_moderate, 0.02, OracleSense::Minimize, 1e-3);
        CHECK(std::fabs(alpha(ct, p, mostly_moderate, 0.02).value - op.value) <= 2e-3);
    }
}

TEST_CASE("cost of robustness") {
    // Fully aligned interests: the agent optimum is the principal optimum.
    Game aligned = random_game(9, 2, 3, 2);
    aligned.v_table = aligned.u_table;
    aligned.validate();
    Prior p = random_prior(11, 2);
    CHECK(cost_of_robustness(aligned, p, 0.0) == doctest::Approx(0.0).epsilon(1e-9));

    // Single response: the adversary has no freedom.
    Game single = random_game(21, 2, 1, 3);
    CHECK(cost_of_robustness(single, p, 0.4) == doctest::Approx(0.0).epsilon(1e-12));

    // Judge-prosecutor sweep; the trend check for linear growth.
    Game jp = judge_prosecutor(0.05);
    const double d05 = cost_of_robustness(jp, kThird, 0.05);
    const double d10 = cost_of_robustness(jp, kThird, 0.10);
    const double d20 = cost_of_robustness(jp, kThird, 0.20);
    CHECK(d05 == doctest::Approx(0.366666667).epsilon(1e-6));
    CHECK(d10 == doctest::Approx(0.516666667).epsilon(1e-6));
    CHECK(d10 <= 2.5 * d05 + 1e-9);
    CHECK(d20 <= 2.5 * d10 + 1e-9);
    CHECK(d05 >= 0.0);
}

TEST_CASE("budget-slack inequality on random instances") {
    for (std::uint64_t seed = 300; seed < 340; ++seed) {
        Game g = random_game(seed, 2 + seed % 2, 2 + seed % 3, 1 + seed % 2);
        Prior p = random_prior(seed + 7, g.n_states());
        const double eps = 0.02 + 0.9 * unit_draw(seed, 771);
        const double eps_extra = 0.02 + 0.9 * unit_draw(seed, 772);
        const std::size_t pol = seed % g.n_policies();
        const double a1 = alpha(g, pol, p, eps).value;
        const double a2 = alpha(g, pol, p, eps + eps_extra).value;
        const double b1 = beta(g, pol, p, eps).value;
        const double b2 = beta(g, pol, p, eps + eps_extra).value;
        CHECK(a2 >= a1 - eps_extra / eps - 1e-9);
        CHECK(b2 <= b1 + eps_extra / eps + 1e-9);
        // Monotone in the budget, and the worst case never beats the best.
        CHECK(a2 <= a1 + 1e-9);
        CHECK(b2 >= b1 - 1e-9);
        CHECK(a1 <= b1 + 1e-9);
        // Convexity of the worst case: midpoint test.
        const double mid = alpha(g, pol, p, eps + eps_extra / 2.0).value;
        CHECK(mid <= (a1 + a2) / 2.0 + 1e-9);
    }
}

TEST_CASE("misspecified-distribution bounds") {
    for (std::uint64_t seed = 400; seed < 430; ++seed) {
        Game g = random_game(seed, 2 + seed % 2, 2 + seed % 2, 2 + seed % 2);
        Prior pi = random_prior(seed + 1, g.n_states());
        Prior pi2 = random_prior(seed + 2, g.n_states());
        const double eps = 0.05 + 0.8 * unit_draw(seed, 773);
        const double d = l1_distance(pi, pi2);
        const std::size_t pol = seed % g.n_policies();
        CHECK(alpha(g, pol, pi, eps).value >=
              alpha(g, pol, pi2, eps).value - 2.0 * d / eps - d - 1e-9);
        const int p_star = robust_policy(g, pi, eps).policy;
        const int p_tilde = robust_policy(g, pi2, eps).policy;
        CHECK(alpha(g, static_cast<std::size_t>(p_tilde), pi, eps).value >=
              alpha(g, static_cast<std::size_t>(p_star), pi, eps).value - 4.0 * d / eps -
                  2.0 * d - 1e-9);
    }
}

TEST_CASE("robust policy is deterministic and parallel-stable") {
    Game jp = judge_prosecutor(0.05);
    PolicyChoice serial = robust_policy(jp, kThird, 0.07, false);
    PolicyChoice parallel = robust_policy(jp, kThird, 0.07, true);
    CHECK(serial.policy == parallel.policy);
    CHECK(serial.robust.value == parallel.robust.value);
    for (std::size_t i = 0; i < serial.robust.witness.size(); ++i)
        CHECK(serial.robust.witness[i] == parallel.robust.witness[i]);
}
