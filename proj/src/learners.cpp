#include "mdlab/learners.hpp"

#include <cmath>
#include <stdexcept>

namespace mdlab {

namespace {

void check_input(const LearnerInput& in, int round) {
    if (!in.state_history || !in.response_history || !in.policy_history)
        throw std::invalid_argument("learner input: missing history");
    const std::size_t t = static_cast<std::size_t>(round);
    if (in.state_history->size() != t || in.response_history->size() != t ||
        in.policy_history->size() != t)
        throw std::invalid_argument("learner input: history lengths inconsistent with round");
}

int argmax_response(const Game& game, std::size_t policy, const Prior& belief) {
    int best = 0;
    double best_v = game.expected_u(0, policy, belief);
    for (std::size_t r = 1; r < game.n_responses(); ++r) {
        const double v = game.expected_u(r, policy, belief);
        if (v > best_v) {
            best = static_cast<int>(r);
            best_v = v;
        }
    }
    return best;
}

std::vector<double> point_mass(std::size_t n, int index) {
    std::vector<double> d(n, 0.0);
    d[static_cast<std::size_t>(index)] = 1.0;
    return d;
}

bool contains(const std::vector<int>& xs, int x) {
    for (int v : xs)
        if (v == x) return true;
    return false;
}

}  // namespace

std::vector<double> Learner::respond(const Game& game, const LearnerInput& in) {
    check_input(in, round_);
    if (responded_) throw std::logic_error("learner: respond called twice in one round");
    std::vector<double> dist = query(game, in);
    pending_policy_ = in.current_policy;
    responded_ = true;
    return dist;
}

void Learner::observe(const Game& game, int outcome) {
    if (!responded_) throw std::logic_error("learner: observe before respond");
    if (outcome < 0 || outcome >= static_cast<int>(game.n_states()))
        throw std::out_of_range("learner: outcome out of range");
    on_observe(game, pending_policy_, outcome);
    responded_ = false;
    pending_policy_ = -1;
    ++round_;
}

namespace {

class CflLearner final : public Learner {
public:
    CflLearner(std::uint64_t seed, std::optional<Prior> fixed_prior)
        : Learner(seed), fixed_prior_(std::move(fixed_prior)) {}

    std::vector<double> query(const Game& game, const LearnerInput& in) const override {
        // The fixed-prior variant is this learner with the forecast input
        // pinned to a constant, so the pin takes precedence.
        const Prior* belief = nullptr;
        if (fixed_prior_)
            belief = &*fixed_prior_;
        else if (in.published_forecast)
            belief = &*in.published_forecast;
        else
            throw std::invalid_argument("cfl: no published forecast");
        return point_mass(game.n_responses(),
                          argmax_response(game, static_cast<std::size_t>(in.current_policy), *belief));
    }

    std::unique_ptr<Learner> fresh_clone(std::uint64_t seed) const override {
        return std::make_unique<CflLearner>(seed, fixed_prior_);
    }

private:
    std::optional<Prior> fixed_prior_;  // set for the fixed-prior Bayes variant
};

class ExpWeightsLearner final : public Learner {
public:
    ExpWeightsLearner(const Game& game, std::uint64_t seed, double eta)
        : Learner(seed), eta_(eta),
          weights_(game.n_policies(), std::vector<double>(game.n_responses(), 1.0)) {}

    std::vector<double> query(const Game& game, const LearnerInput& in) const override {
        const auto& row = weights_[static_cast<std::size_t>(in.current_policy)];
        double s = 0.0;
        for (double w : row) s += w;
        std::vector<double> d(row.size());
        for (std::size_t r = 0; r < row.size(); ++r) d[r] = row[r] / s;
        return d;
    }

    std::unique_ptr<Learner> fresh_clone(std::uint64_t seed) const override {
        auto c = std::make_unique<ExpWeightsLearner>(*this);
        c->seed_ = seed;
        c->round_ = 0;
        c->responded_ = false;
        c->pending_policy_ = -1;
        for (auto& row : c->weights_) row.assign(row.size(), 1.0);
        return c;
    }

protected:
    void on_observe(const Game& game, int policy, int outcome) override {
        auto& row = weights_[static_cast<std::size_t>(policy)];
        double row_max = 0.0;
        for (std::size_t r = 0; r < row.size(); ++r) {
            row[r] *= std::exp(eta_ * game.u(r, static_cast<std::size_t>(policy),
                                             static_cast<std::size_t>(outcome)));
            row_max = std::max(row_max, row[r]);
        }
        for (double& w : row) w /= row_max;
    }

private:
    double eta_;
    std::vector<std::vector<double>> weights_;  // [policy][response]
};

// Selective learners of the impossibility constructions. The trigger is read
// off the first round; aligned cases play the fixed best-in-hindsight
// response, crossed cases play per-round scripted behavior. Off-script the
// learner hands over to an exponential-weights fallback, which keeps its
// no-ER guarantee sequence-uniform.
class SelectiveLearner final : public Learner {
public:
    SelectiveLearner(const Game& game, const LearnerSpec& spec, std::uint64_t seed)
        : Learner(seed), spec_(spec),
          fallback_(game.n_policies(), std::vector<double>(game.n_responses(), 1.0)) {}

    std::vector<double> query(const Game& game, const LearnerInput& in) const override {
        const auto& script = spec_.scripted_states;
        const bool off_script = (deviated_round_ >= 0 && round_ > deviated_round_) ||
                                round_ >= static_cast<int>(script.size());
        if (off_script) {
            const auto& row = fallback_[static_cast<std::size_t>(in.current_policy)];
            double s = 0.0;
            for (double w : row) s += w;
            std::vector<double> d(row.size());
            for (std::size_t r = 0; r < row.size(); ++r) d[r] = row[r] / s;
            return d;
        }
        const std::size_t p = static_cast<std::size_t>(in.current_policy);
        if (!crossed_case(in)) {
            const std::size_t hp =
                round_ == 0 ? p : static_cast<std::size_t>(first_policy_);
            return point_mass(game.n_responses(), best_in_hindsight(game, hp));
        }
        const int y = script[static_cast<std::size_t>(round_)];
        const int opt = script_optimum(game, p, y);
        if (spec_.kind == LearnerKind::SelectiveSuperefficiency)
            return point_mass(game.n_responses(), opt);
        const int pess = script_pessimum(game, p, y);
        std::vector<double> d(game.n_responses(), 0.0);
        d[static_cast<std::size_t>(opt)] += spec_.mix_q;
        d[static_cast<std::size_t>(pess)] += 1.0 - spec_.mix_q;
        return d;
    }

    std::unique_ptr<Learner> fresh_clone(std::uint64_t seed) const override {
        auto c = std::make_unique<SelectiveLearner>(*this);
        c->seed_ = seed;
        c->round_ = 0;
        c->responded_ = false;
        c->pending_policy_ = -1;
        c->first_policy_ = -1;
        c->deviated_round_ = -1;
        for (auto& row : c->fallback_) row.assign(row.size(), 1.0);
        return c;
    }

protected:
    void on_observe(const Game& game, int policy, int outcome) override {
        if (round_ == 0) first_policy_ = policy;
        if (deviated_round_ < 0 &&
            (round_ >= static_cast<int>(spec_.scripted_states.size()) ||
             spec_.scripted_states[static_cast<std::size_t>(round_)] != outcome))
            deviated_round_ = round_;
        // Keep the fallback warm so a deviation can hand over mid-run.
        auto& row = fallback_[static_cast<std::size_t>(policy)];
        double row_max = 0.0;
        for (std::size_t r = 0; r < row.size(); ++r) {
            row[r] *= std::exp(spec_.eta * game.u(r, static_cast<std::size_t>(policy),
                                                  static_cast<std::size_t>(outcome)));
            row_max = std::max(row_max, row[r]);
        }
        for (double& w : row) w /= row_max;
    }

private:
    bool crossed_case(const LearnerInput& in) const {
        const int y1 = spec_.scripted_states[0];
        const int p1 = round_ == 0 ? in.current_policy : first_policy_;
        const bool y_in = contains(spec_.trigger_states, y1);
        const bool p_in = contains(spec_.trigger_policies, p1);
        return y_in != p_in;
    }

    int best_in_hindsight(const Game& game, std::size_t policy) const {
        int best = 0;
        double best_v = -1.0;
        for (std::size_t r = 0; r < game.n_responses(); ++r) {
            double total = 0.0;
            for (int y : spec_.scripted_states)
                total += game.u(r, policy, static_cast<std::size_t>(y));
            if (total > best_v) {
                best = static_cast<int>(r);
                best_v = total;
            }
        }
        return best;
    }

    static int script_optimum(const Game& game, std::size_t policy, int y) {
        int best = 0;
        double best_v = game.u(0, policy, static_cast<std::size_t>(y));
        for (std::size_t r = 1; r < game.n_responses(); ++r) {
            const double v = game.u(r, policy, static_cast<std::size_t>(y));
            if (v > best_v) {
                best = static_cast<int>(r);
                best_v = v;
            }
        }
        return best;
    }

    static int script_pessimum(const Game& game, std::size_t policy, int y) {
        int best = 0;
        double best_v = game.u(0, policy, static_cast<std::size_t>(y));
        for (std::size_t r = 1; r < game.n_responses(); ++r) {
            const double v = game.u(r, policy, static_cast<std::size_t>(y));
            if (v < best_v) {
                best = static_cast<int>(r);
                best_v = v;
            }
        }
        return best;
    }

    LearnerSpec spec_;
    int first_policy_ = -1;
    int deviated_round_ = -1;
    std::vector<std::vector<double>> fallback_;  // exp-weights rows [policy][response]
};

}  // namespace

void LearnerSpec::validate(const Game& game) const {
    if (kind == LearnerKind::FixedPriorBayes) {
        if (fixed_prior.size() != game.n_states() || !is_distribution(fixed_prior))
            throw std::invalid_argument("learner spec: fixed prior invalid");
    }
    if (kind == LearnerKind::SelectiveSuperefficiency ||
        kind == LearnerKind::SelectiveSuperinefficiency) {
        if (scripted_states.empty())
            throw std::invalid_argument("learner spec: adversarial kinds require a scripted sequence");
        for (int y : scripted_states)
            if (y < 0 || y >= static_cast<int>(game.n_states()))
                throw std::invalid_argument("learner spec: scripted state out of range");
        for (int y : trigger_states)
            if (y < 0 || y >= static_cast<int>(game.n_states()))
                throw std::invalid_argument("learner spec: trigger state out of range");
        for (int p : trigger_policies)
            if (p < 0 || p >= static_cast<int>(game.n_policies()))
                throw std::invalid_argument("learner spec: trigger policy out of range");
    }
    if (kind == LearnerKind::SelectiveSuperinefficiency) {
        if (!(mix_q >= 0.0 && mix_q <= 1.0))
            throw std::invalid_argument("learner spec: superinefficiency needs calibrated q in [0,1]");
    }
    if (kind == LearnerKind::ExpWeightsPerContext && !(eta > 0.0))
        throw std::invalid_argument("learner spec: eta must be > 0");
}

std::unique_ptr<Learner> make_learner(const Game& game, const LearnerSpec& spec) {
    spec.validate(game);
    switch (spec.kind) {
        case LearnerKind::Cfl:
            return std::make_unique<CflLearner>(spec.seed, std::nullopt);
        case LearnerKind::FixedPriorBayes:
            return std::make_unique<CflLearner>(spec.seed, spec.fixed_prior);
        case LearnerKind::ExpWeightsPerContext:
            return std::make_unique<ExpWeightsLearner>(game, spec.seed, spec.eta);
        case LearnerKind::SelectiveSuperefficiency:
        case LearnerKind::SelectiveSuperinefficiency:
            return std::make_unique<SelectiveLearner>(game, spec, spec.seed);
    }
    throw std::invalid_argument("learner spec: unknown kind");
}

double calibrate_ex3_q(const Game& game, const std::vector<int>& scripted_states,
                       std::size_t policy) {
    if (scripted_states.empty()) throw std::invalid_argument("calibrate: empty script");
    const std::size_t nr = game.n_responses();
    const double t = static_cast<double>(scripted_states.size());

    double best_fixed = -1.0;
    for (std::size_t r = 0; r < nr; ++r) {
        double total = 0.0;
        for (int y : scripted_states) total += game.u(r, policy, static_cast<std::size_t>(y));
        best_fixed = std::max(best_fixed, total / t);
    }
    double avg_opt = 0.0, avg_pess = 0.0;
    for (int y : scripted_states) {
        double lo = 1.0, hi = 0.0;
        for (std::size_t r = 0; r < nr; ++r) {
            const double u = game.u(r, policy, static_cast<std::size_t>(y));
            lo = std::min(lo, u);
            hi = std::max(hi, u);
        }
        avg_opt += hi;
        avg_pess += lo;
    }
    avg_opt /= t;
    avg_pess /= t;

    // Expected ER of the mixture as a function of q.
    auto er = [&](double q) { return best_fixed - (q * avg_opt + (1.0 - q) * avg_pess); };
    if (er(0.0) <= 1e-12)
        throw std::domain_error("calibrate: scripted pessimum does not strictly underperform");
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && std::fabs(er((lo + hi) / 2.0)) > 1e-9; ++it) {
        const double mid = (lo + hi) / 2.0;
        if (er(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double q = (lo + hi) / 2.0;
    if (std::fabs(er(q)) > 1e-6)
        throw std::domain_error("calibrate: no root with |ER| <= 1e-6 in [0,1]");
    return q;
}

const char* learner_kind_name(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::Cfl: return "cfl";
        case LearnerKind::ExpWeightsPerContext: return "exp_weights";
        case LearnerKind::FixedPriorBayes: return "fixed_prior_bayes";
        case LearnerKind::SelectiveSuperefficiency: return "selective_superefficiency";
        case LearnerKind::SelectiveSuperinefficiency: return "selective_superinefficiency";
    }
    return "unknown";
}

}  // namespace mdlab
