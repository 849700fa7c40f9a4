#include "mdlab/mechanisms.hpp"

#include <stdexcept>

#include "mdlab/info.hpp"
#include "mdlab/stage.hpp"

namespace mdlab {

ForecastGrid MechanismSpec::build_grid(std::size_t n_states) const {
    if (forecast_points.empty()) return ForecastGrid::lattice(n_states, forecast_delta);
    ForecastGrid g;
    g.delta = forecast_delta;
    g.points = forecast_points;
    return g;
}

void MechanismSpec::validate(const Game& game) const {
    if (kind != MechanismKind::Constant && !(epsilon_bar > 0.0))
        throw std::invalid_argument("mechanism spec: epsilon_bar must be > 0 for M1/M2/M3");
    if (kind == MechanismKind::Constant &&
        (fixed_policy < 0 || fixed_policy >= static_cast<int>(game.n_policies())))
        throw std::invalid_argument("mechanism spec: fixed_policy out of range");
    if (!(forecast_delta > 0.0 && forecast_delta <= 1.0))
        throw std::invalid_argument("mechanism spec: forecast_delta outside (0,1]");
    for (const Prior& p : forecast_points)
        if (p.size() != game.n_states() || !is_distribution(p))
            throw std::invalid_argument("mechanism spec: forecast point is not a state distribution");
    for (int p : alternatives)
        if (p < 0 || p >= static_cast<int>(game.n_policies()))
            throw std::invalid_argument("mechanism spec: alternative policy out of range");
}

namespace {

// Shared solver plumbing: a forecaster over the grid plus a per-grid-point
// policy cache. The policy rule is the only thing the concrete kinds change.
class ForecastMechanism : public Mechanism {
public:
    ForecastMechanism(const Game& game, const MechanismSpec& spec, long horizon,
                      std::uint64_t seed)
        : Mechanism(spec.build_grid(game.n_states())),
          game_(&game),
          spec_(spec),
          contextual_(spec.kind == MechanismKind::M1),
          bank_(horizon_learning_rate(grid_.points.size(), horizon), grid_.points.size(), seed),
          policy_cache_(grid_.points.size(), -1) {}

    PolicyAnnouncement choose_policy(const MechanismInput& input,
                                     const std::vector<int>* oracle_context) override {
        if (!input.state_history || !input.policy_history)
            throw std::invalid_argument("mechanism input: missing history");
        if (contextual_ && !oracle_context)
            throw std::invalid_argument("m1 requires the information oracle");
        if (!contextual_ && oracle_context)
            throw std::invalid_argument("mechanism must not receive an oracle context");
        if (pending_) throw std::logic_error("mechanism: choose_policy called twice in one round");

        last_context_ = contextual_ ? *oracle_context : std::vector<int>{};
        ForecastDecision d = bank_.state(last_context_).predict(grid_);

        PolicyAnnouncement ann;
        ann.forecast_cell = d.sampled;
        ann.forecast = grid_.points[static_cast<std::size_t>(d.sampled)];
        ann.policy = policy_for(d.sampled);
        pending_ = true;
        return ann;
    }

    void observe(int outcome) override {
        if (!pending_) throw std::logic_error("mechanism: observe before choose_policy");
        bank_.state(last_context_).update(grid_, static_cast<std::size_t>(outcome));
        pending_ = false;
    }

protected:
    virtual int solve_policy(const Prior& forecast) = 0;

    const Game* game_;
    MechanismSpec spec_;

private:
    int policy_for(int cell) {
        int& cached = policy_cache_[static_cast<std::size_t>(cell)];
        if (cached < 0) cached = solve_policy(grid_.points[static_cast<std::size_t>(cell)]);
        return cached;
    }

    bool contextual_;
    ContextualForecaster bank_;
    std::vector<int> policy_cache_;
    std::vector<int> last_context_;
    bool pending_ = false;
};

class ConstantMechanism final : public ForecastMechanism {
public:
    using ForecastMechanism::ForecastMechanism;

protected:
    int solve_policy(const Prior&) override { return spec_.fixed_policy; }
};

class RobustMechanism final : public ForecastMechanism {
public:
    using ForecastMechanism::ForecastMechanism;

protected:
    int solve_policy(const Prior& forecast) override {
        return robust_policy(*game_, forecast, spec_.epsilon_bar).policy;
    }
};

class InfoRobustMechanism final : public ForecastMechanism {
public:
    using ForecastMechanism::ForecastMechanism;

protected:
    int solve_policy(const Prior& forecast) override {
        return info_robust_policy(*game_, forecast, spec_.epsilon_bar).policy;
    }
};

}  // namespace

std::unique_ptr<Mechanism> make_mechanism(const Game& game, const MechanismSpec& spec,
                                          long horizon, std::uint64_t seed) {
    spec.validate(game);
    switch (spec.kind) {
        case MechanismKind::Constant:
            return std::make_unique<ConstantMechanism>(game, spec, horizon, seed);
        case MechanismKind::M1:
        case MechanismKind::M2:
            return std::make_unique<RobustMechanism>(game, spec, horizon, seed);
        case MechanismKind::M3:
            return std::make_unique<InfoRobustMechanism>(game, spec, horizon, seed);
    }
    throw std::invalid_argument("mechanism spec: unknown kind");
}

const char* mechanism_kind_name(MechanismKind kind) {
    switch (kind) {
        case MechanismKind::Constant: return "constant";
        case MechanismKind::M1: return "m1";
        case MechanismKind::M2: return "m2";
        case MechanismKind::M3: return "m3";
    }
    return "unknown";
}

}  // namespace mdlab
