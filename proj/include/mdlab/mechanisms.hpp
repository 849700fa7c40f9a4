#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mdlab/forecaster.hpp"
#include "mdlab/game.hpp"

namespace mdlab {

/// What the mechanism sees. Excludes the response history by construction:
/// nonresponsiveness is a property of this type, not a runtime promise.
struct MechanismInput {
    const std::vector<int>* state_history = nullptr;
    const std::vector<int>* policy_history = nullptr;
};

enum class MechanismKind { Constant, M1, M2, M3 };

struct MechanismSpec {
    MechanismKind kind = MechanismKind::Constant;
    double epsilon_bar = 0.1;           // robustness parameter, M1-M3
    int fixed_policy = 0;               // Constant
    double forecast_delta = 0.1;        // grid step for the forecaster
    std::vector<Prior> forecast_points; // explicit grid; lattice(delta) when empty
    std::vector<int> alternatives;      // P0: counterfactual policies for regret accounting
    std::uint64_t seed = 0;

    ForecastGrid build_grid(std::size_t n_states) const;
    void validate(const Game& game) const;
};

struct PolicyAnnouncement {
    int policy = 0;
    Prior forecast;         // published alongside the policy every round
    int forecast_cell = 0;  // grid index of the forecast
};

class Mechanism {
public:
    virtual ~Mechanism() = default;

    /// M1 requires the oracle context (the learner's counterfactual response
    /// cells over the policy cover); the other kinds must not receive one.
    virtual PolicyAnnouncement choose_policy(const MechanismInput& input,
                                             const std::vector<int>* oracle_context) = 0;
    virtual void observe(int outcome) = 0;

    const ForecastGrid& grid() const { return grid_; }

protected:
    explicit Mechanism(ForecastGrid grid) : grid_(std::move(grid)) {}
    ForecastGrid grid_;
};

std::unique_ptr<Mechanism> make_mechanism(const Game& game, const MechanismSpec& spec,
                                          long horizon, std::uint64_t seed);

const char* mechanism_kind_name(MechanismKind kind);

}  // namespace mdlab
