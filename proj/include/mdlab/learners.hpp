#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mdlab/game.hpp"

namespace mdlab {

struct LearnerInput {
    const std::vector<int>* state_history = nullptr;
    const std::vector<int>* response_history = nullptr;
    const std::vector<int>* policy_history = nullptr;  // p_1 .. p_{t-1}
    int current_policy = 0;
    std::optional<Prior> published_forecast;
};

enum class LearnerKind {
    Cfl,
    ExpWeightsPerContext,
    FixedPriorBayes,
    SelectiveSuperefficiency,
    SelectiveSuperinefficiency,
};

struct LearnerSpec {
    LearnerKind kind = LearnerKind::Cfl;
    std::uint64_t seed = 0;
    double eta = 0.5;                      // ExpWeightsPerContext
    Prior fixed_prior;                     // FixedPriorBayes
    std::vector<int> scripted_states;      // adversarial kinds
    std::vector<int> trigger_states;       // Y subset, state indices
    std::vector<int> trigger_policies;     // P subset, policy indices
    double mix_q = -1.0;                   // Ex3 mixing weight; calibrate first

    void validate(const Game& game) const;
};

/// Agent-side strategy. respond() must be called exactly once per round before
/// observe(); query() is the same computation without touching state and is
/// what the information oracle uses.
class Learner {
public:
    virtual ~Learner() = default;

    std::vector<double> respond(const Game& game, const LearnerInput& in);
    virtual std::vector<double> query(const Game& game, const LearnerInput& in) const = 0;
    void observe(const Game& game, int outcome);

    /// Fresh replica at round zero with the given seed. Counterfactual clones
    /// share the original seed so randomness is common across worlds.
    virtual std::unique_ptr<Learner> fresh_clone(std::uint64_t seed) const = 0;

    std::uint64_t seed() const { return seed_; }
    int round() const { return round_; }

protected:
    explicit Learner(std::uint64_t seed) : seed_(seed) {}
    virtual void on_observe(const Game& game, int policy, int outcome) {}

    std::uint64_t seed_ = 0;
    int round_ = 0;
    int pending_policy_ = -1;
    bool responded_ = false;
};

std::unique_ptr<Learner> make_learner(const Game& game, const LearnerSpec& spec);

/// Mixing weight for the selective-superinefficiency learner: bisection on
/// expected external regret under the given constant policy until |ER| <= 1e-6.
/// Throws std::domain_error when the scripted pessimum fails to strictly
/// underperform the best-in-hindsight response.
double calibrate_ex3_q(const Game& game, const std::vector<int>& scripted_states,
                       std::size_t policy);

const char* learner_kind_name(LearnerKind kind);

}  // namespace mdlab
