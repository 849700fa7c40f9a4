#include <doctest.h>

#include <cmath>

#include "mdlab/learners.hpp"
#include "mdlab/scenarios.hpp"

using namespace mdlab;

namespace {

struct Sim {
    const Game& game;
    std::vector<int> y_hist, r_hist, p_hist;

    LearnerInput input(int policy, std::optional<Prior> forecast = std::nullopt) const {
        LearnerInput in;
        in.state_history = &y_hist;
        in.response_history = &r_hist;
        in.policy_history = &p_hist;
        in.current_policy = policy;
        in.published_forecast = std::move(forecast);
        return in;
    }

    // One round against a constant policy; returns the response distribution
    // and advances the learner on the given outcome.
    std::vector<double> step(Learner& learner, int policy, int outcome,
                             std::optional<Prior> forecast = std::nullopt) {
        std::vector<double> mu = learner.respond(game, input(policy, std::move(forecast)));
        learner.observe(game, outcome);
        int realized = 0;
        for (std::size_t r = 1; r < mu.size(); ++r)
            if (mu[r] > mu[static_cast<std::size_t>(realized)]) realized = static_cast<int>(r);
        y_hist.push_back(outcome);
        r_hist.push_back(realized);
        p_hist.push_back(policy);
        return mu;
    }
};

// Average expected external regret of a constant-policy run.
double external_regret(const Game& game, int policy,
                       const std::vector<std::vector<double>>& dists,
                       const std::vector<int>& outcomes) {
    const double t = static_cast<double>(outcomes.size());
    double achieved = 0.0;
    std::vector<double> fixed(game.n_responses(), 0.0);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const std::size_t y = static_cast<std::size_t>(outcomes[i]);
        for (std::size_t r = 0; r < game.n_responses(); ++r) {
            achieved += dists[i][r] * game.u(r, static_cast<std::size_t>(policy), y);
            fixed[r] += game.u(r, static_cast<std::size_t>(policy), y);
        }
    }
    double best = fixed[0];
    for (double x : fixed) best = std::max(best, x);
    return (best - achieved) / t;
}

std::vector<int> bernoulli_script(std::uint64_t seed, long t, double p_zero) {
    std::vector<int> out = {0};  // round one pinned to state 0 for the triggers
    for (long i = 1; i < t; ++i)
        out.push_back(unit_draw(seed, static_cast<std::uint64_t>(i)) < p_zero ? 0 : 1);
    return out;
}

}  // namespace

TEST_CASE("cfl best-responds to the published forecast") {
    Game jp = judge_prosecutor(0.05);
    LearnerSpec spec;
    spec.kind = LearnerKind::Cfl;
    auto cfl = make_learner(jp, spec);
    Sim sim{jp};

    // Point mass on guilty under full transparency: follow the message.
    std::vector<double> mu = cfl->respond(jp, sim.input(0, Prior{1.0, 0.0}));
    CHECK(mu == std::vector<double>{1.0, 0.0, 0.0, 0.0});
    cfl->observe(jp, 0);

    // No forecast published: refuse.
    CHECK_THROWS_AS(cfl->respond(jp, sim.input(0)), std::invalid_argument);
}

TEST_CASE("cfl per-round suboptimality against the forecast is exactly zero") {
    Game jp = judge_prosecutor(0.05);
    LearnerSpec spec;
    spec.kind = LearnerKind::Cfl;
    auto cfl = make_learner(jp, spec);
    Sim sim{jp};
    for (std::uint64_t t = 0; t < 50; ++t) {
        const double g = unit_draw(4, t);
        const Prior forecast = {g, 1.0 - g};
        const int policy = static_cast<int>(t % jp.n_policies());
        std::vector<double> mu = cfl->respond(jp, sim.input(policy, forecast));
        double achieved = 0.0, best = 0.0;
        for (std::size_t r = 0; r < 4; ++r) {
            const double eu = jp.expected_u(r, static_cast<std::size_t>(policy), forecast);
            achieved += mu[r] * eu;
            best = std::max(best, eu);
        }
        CHECK(achieved == doctest::Approx(best).epsilon(1e-15));
        cfl->observe(jp, static_cast<int>(t % 2));
        sim.y_hist.push_back(static_cast<int>(t % 2));
        sim.r_hist.push_back(0);
        sim.p_hist.push_back(policy);
    }
}

TEST_CASE("fixed-prior bayes is cfl with a constant forecast") {
    Game jp = judge_prosecutor(0.05);
    const Prior prior = {0.4, 0.6};
    LearnerSpec bayes_spec;
    bayes_spec.kind = LearnerKind::FixedPriorBayes;
    bayes_spec.fixed_prior = prior;
    auto bayes = make_learner(jp, bayes_spec);
    LearnerSpec cfl_spec;
    cfl_spec.kind = LearnerKind::Cfl;
    auto cfl = make_learner(jp, cfl_spec);
    Sim sim{jp};
    for (int t = 0; t < 20; ++t) {
        const int policy = t % 21;
        CHECK(bayes->respond(jp, sim.input(policy)) ==
              cfl->respond(jp, sim.input(policy, prior)));
        bayes->observe(jp, t % 2);
        cfl->observe(jp, t % 2);
        sim.y_hist.push_back(t % 2);
        sim.r_hist.push_back(0);
        sim.p_hist.push_back(policy);
    }
}

TEST_CASE("exp weights update is the definitional multiplicative rule") {
    Game jp = judge_prosecutor(0.05);
    LearnerSpec spec;
    spec.kind = LearnerKind::ExpWeightsPerContext;
    spec.eta = 0.8;
    auto learner = make_learner(jp, spec);
    Sim sim{jp};

    std::vector<double> before = learner->respond(jp, sim.input(3));
    for (double x : before) CHECK(x == doctest::Approx(0.25));
    learner->observe(jp, 0);
    sim.y_hist.push_back(0);
    sim.r_hist.push_back(0);
    sim.p_hist.push_back(3);

    std::vector<double> after = learner->respond(jp, sim.input(3));
    // Probability ratios follow exp(eta * (U(r) - U(r'))).
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t rr = 0; rr < 4; ++rr) {
            const double expected =
                std::exp(spec.eta * (jp.u(r, 3, 0) - jp.u(rr, 3, 0)));
            CHECK(after[r] / after[rr] == doctest::Approx(expected).epsilon(1e-12));
        }
    learner->observe(jp, 0);
    sim.y_hist.push_back(0);
    sim.r_hist.push_back(0);
    sim.p_hist.push_back(3);

    // A different policy context is untouched.
    std::vector<double> other = learner->respond(jp, sim.input(7));
    for (double x : other) CHECK(x == doctest::Approx(0.25));
    learner->observe(jp, 0);
}

TEST_CASE("exp weights regret shrinks with the horizon") {
    Game jp = judge_prosecutor(0.05);
    auto run = [&](long horizon) {
        LearnerSpec spec;
        spec.kind = LearnerKind::ExpWeightsPerContext;
        spec.eta = std::sqrt(8.0 * std::log(4.0) / static_cast<double>(horizon));
        auto learner = make_learner(jp, spec);
        Sim sim{jp};
        std::vector<std::vector<double>> dists;
        std::vector<int> outcomes;
        for (long t = 0; t < horizon; ++t) {
            const int y = unit_draw(6, static_cast<std::uint64_t>(t)) < 0.3 ? 0 : 1;
            dists.push_back(sim.step(*learner, 4, y));
            outcomes.push_back(y);
        }
        return external_regret(jp, 4, dists, outcomes);
    };
    const double er_short = run(1000);
    const double er_long = run(2000);
    CHECK(er_long <= er_short + 1e-3);
    CHECK(er_long <= std::sqrt(2.0 * std::log(4.0) / 2000.0) * 4.0);
}

TEST_CASE("respond/observe protocol errors") {
    Game jp = judge_prosecutor(0.05);
    LearnerSpec spec;
    spec.kind = LearnerKind::ExpWeightsPerContext;
    auto learner = make_learner(jp, spec);
    CHECK_THROWS_AS(learner->observe(jp, 0), std::logic_error);
    Sim sim{jp};
    learner->respond(jp, sim.input(0));
    CHECK_THROWS_AS(learner->respond(jp, sim.input(0)), std::logic_error);
    learner->observe(jp, 0);

    // Histories of unequal length are rejected.
    std::vector<int> y = {0}, r = {}, p = {0};
    LearnerInput bad;
    bad.state_history = &y;
    bad.response_history = &r;
    bad.policy_history = &p;
    bad.current_policy = 0;
    CHECK_THROWS_AS(learner->respond(jp, bad), std::invalid_argument);
}

TEST_CASE("selective superefficiency follows the four trigger cases") {
    Game jp = judge_prosecutor(0.05);
    const std::vector<int> script = bernoulli_script(11, 120, 0.3);
    REQUIRE(script[0] == 0);  // guilty in round one for this seed

    LearnerSpec spec;
    spec.kind = LearnerKind::SelectiveSuperefficiency;
    spec.scripted_states = script;
    spec.trigger_states = {0};
    spec.trigger_policies = {8};

    // Aligned case (y1 in Y, p1 in P): fixed best-in-hindsight response.
    {
        auto learner = make_learner(jp, spec);
        Sim sim{jp};
        std::vector<std::vector<double>> dists;
        std::vector<int> outcomes;
        for (int t = 0; t < 120; ++t) {
            dists.push_back(sim.step(*learner, 8, script[static_cast<std::size_t>(t)]));
            outcomes.push_back(script[static_cast<std::size_t>(t)]);
        }
        for (const auto& d : dists) CHECK(d == dists[0]);  // constant response
        CHECK(std::fabs(external_regret(jp, 8, dists, outcomes)) <= 1e-6);
    }

    // Crossed case (y1 in Y, p1 not in P): per-round scripted optimum.
    {
        auto learner = make_learner(jp, spec);
        Sim sim{jp};
        std::vector<std::vector<double>> dists;
        std::vector<int> outcomes;
        for (int t = 0; t < 120; ++t) {
            const int y = script[static_cast<std::size_t>(t)];
            std::vector<double> mu = sim.step(*learner, 2, y);
            int played = 0;
            for (std::size_t r = 1; r < 4; ++r)
                if (mu[r] > mu[static_cast<std::size_t>(played)]) played = static_cast<int>(r);
            double best = 0.0;
            for (std::size_t r = 0; r < 4; ++r)
                best = std::max(best, jp.u(r, 2, static_cast<std::size_t>(y)));
            CHECK(jp.u(static_cast<std::size_t>(played), 2, static_cast<std::size_t>(y)) ==
                  doctest::Approx(best));
            dists.push_back(std::move(mu));
            outcomes.push_back(y);
        }
        CHECK(external_regret(jp, 2, dists, outcomes) <= 0.0 + 1e-12);
    }
}

TEST_CASE("off-script deviation hands over to the no-regret fallback") {
    Game jp = judge_prosecutor(0.05);
    std::vector<int> script(50, 0);
    LearnerSpec spec;
    spec.kind = LearnerKind::SelectiveSuperefficiency;
    spec.scripted_states = script;
    spec.trigger_states = {0};
    spec.trigger_policies = {8};
    spec.eta = 0.5;
    auto learner = make_learner(jp, spec);
    Sim sim{jp};
    sim.step(*learner, 8, 0);  // on script
    sim.step(*learner, 8, 1);  // deviates here
    std::vector<double> mu = sim.step(*learner, 8, 0);
    // Fallback plays full-support exponential weights, not a point mass.
    int support = 0;
    for (double x : mu)
        if (x > 0.0) ++support;
    CHECK(support == 4);
}

TEST_CASE("calibrating the superinefficiency mix") {
    // Degenerate: the pessimum equals the optimum.
    Game flat;
    flat.state_names = {"y0"};
    flat.response_names = {"a", "b"};
    flat.policy_names = {"p"};
    flat.u_table = {0.5, 0.5};
    flat.v_table = {0.1, 0.9};
    flat.response_metric = {{0.0, 1.0}, {1.0, 0.0}};
    flat.policy_metric = {{0.0}};
    flat.validate();
    CHECK_THROWS_AS(calibrate_ex3_q(flat, {0, 0, 0}, 0), std::domain_error);

    // Linear interpolation: optimum 1, pessimum 0, best fixed 0.6 each round.
    Game line;
    line.state_names = {"even", "odd"};
    line.response_names = {"fixed", "match_even", "match_odd"};
    line.policy_names = {"p"};
    line.u_table = {0.6, 0.6, 1.0, 0.0, 0.0, 1.0};
    line.v_table = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
    line.response_metric = {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
    line.policy_metric = {{0.0}};
    line.validate();
    std::vector<int> alternating;
    for (int t = 0; t < 100; ++t) alternating.push_back(t % 2);
    CHECK(calibrate_ex3_q(line, alternating, 0) == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("superinefficiency plays a calibrated zero-regret mixture") {
    Game jp = judge_prosecutor(0.05);
    const std::vector<int> script = bernoulli_script(13, 200, 0.3);
    REQUIRE(script[0] == 0);
    const int policy = 2;
    const double q = calibrate_ex3_q(jp, script, policy);

    LearnerSpec spec;
    spec.kind = LearnerKind::SelectiveSuperinefficiency;
    spec.scripted_states = script;
    spec.trigger_states = {0};
    spec.trigger_policies = {8};  // crossed under the constant policy 2
    spec.mix_q = q;
    auto learner = make_learner(jp, spec);
    Sim sim{jp};
    std::vector<std::vector<double>> dists;
    std::vector<int> outcomes;
    for (int t = 0; t < 200; ++t) {
        dists.push_back(sim.step(*learner, policy, script[static_cast<std::size_t>(t)]));
        outcomes.push_back(script[static_cast<std::size_t>(t)]);
    }
    CHECK(std::fabs(external_regret(jp, policy, dists, outcomes)) <= 1e-6);
}

TEST_CASE("clones restart fresh and share nothing") {
    Game jp = judge_prosecutor(0.05);
    LearnerSpec spec;
    spec.kind = LearnerKind::ExpWeightsPerContext;
    spec.eta = 0.7;
    auto learner = make_learner(jp, spec);
    Sim sim{jp};
    sim.step(*learner, 3, 0);
    sim.step(*learner, 3, 0);
    auto clone = learner->fresh_clone(99);
    CHECK(clone->round() == 0);
    CHECK(clone->seed() == 99);
    Sim sim2{jp};
    std::vector<double> fresh = clone->respond(jp, sim2.input(3));
    for (double x : fresh) CHECK(x == doctest::Approx(0.25));
}
