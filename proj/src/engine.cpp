#include "mdlab/engine.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "mdlab/stage.hpp"

namespace mdlab {

Transcript run(const Game& game, const MechanismSpec& mechanism_spec,
               const LearnerSpec& learner_spec, const std::vector<int>& states,
               std::uint64_t master_seed, const std::vector<int>* response_override) {
    if (states.empty()) throw std::invalid_argument("run: horizon must be >= 1");
    for (int y : states)
        if (y < 0 || y >= static_cast<int>(game.n_states()))
            throw std::invalid_argument("run: state index out of range");
    mechanism_spec.validate(game);
    learner_spec.validate(game);
    if (response_override && response_override->size() != states.size())
        throw std::invalid_argument("run: response override length mismatch");

    const long horizon = static_cast<long>(states.size());
    const std::uint64_t learner_seed = mix64(master_seed, mix64(0xA9E17ULL, learner_spec.seed));
    const std::uint64_t mech_seed = mix64(master_seed, mix64(0xB44DULL, mechanism_spec.seed));

    LearnerSpec seeded_learner = learner_spec;
    seeded_learner.seed = learner_seed;

    auto mech = make_mechanism(game, mechanism_spec, horizon, mech_seed);
    auto agent = make_learner(game, seeded_learner);
    auto shadow = agent->fresh_clone(learner_seed);

    const std::vector<int>& alternatives = mechanism_spec.alternatives;
    std::vector<std::unique_ptr<Learner>> clones;
    for (std::size_t i = 0; i < alternatives.size(); ++i)
        clones.push_back(agent->fresh_clone(learner_seed));

    // The counterfactual constant mechanisms publish the plain state
    // forecaster's output; for the non-contextual kinds this reproduces the
    // realized forecast sequence exactly (same grid, learning rate and seed).
    const ForecastGrid& grid = mech->grid();
    ForecasterState cf_forecaster(horizon_learning_rate(grid.points.size(), horizon),
                                  grid.points.size(), mech_seed);

    Transcript out;
    out.game = &game;
    out.mechanism = mechanism_spec;
    out.learner = learner_spec;
    out.alternatives = alternatives;
    out.grid = grid;
    out.master_seed = master_seed;

    std::vector<int> y_hist, r_hist, p_hist;
    std::vector<int> shadow_r_hist;
    std::vector<std::vector<int>> clone_r_hist(alternatives.size());
    std::vector<std::vector<int>> clone_p_hist(alternatives.size());

    std::map<std::vector<int>, int> cir_index, fcir_index;
    Prior prev_cf_forecast = uniform_prior(game.n_states());

    const bool needs_oracle = mechanism_spec.kind == MechanismKind::M1;

    for (long t = 0; t < horizon; ++t) {
        const double u_t = unit_draw(learner_seed, static_cast<std::uint64_t>(t));

        // Information oracle: what would the learner do this round under each
        // policy of the cover, given the realized state/policy history.
        std::vector<int> oracle_ctx;
        if (needs_oracle) {
            oracle_ctx.reserve(game.n_policies());
            for (std::size_t p = 0; p < game.n_policies(); ++p) {
                LearnerInput q;
                q.state_history = &y_hist;
                q.response_history = &shadow_r_hist;
                q.policy_history = &p_hist;
                q.current_policy = static_cast<int>(p);
                q.published_forecast = prev_cf_forecast;
                oracle_ctx.push_back(sample_index(shadow->query(game, q), u_t));
            }
        }

        MechanismInput min_input{&y_hist, &p_hist};
        PolicyAnnouncement ann =
            mech->choose_policy(min_input, needs_oracle ? &oracle_ctx : nullptr);

        ForecastDecision cf_dec = cf_forecaster.predict(grid);
        const Prior& cf_forecast = grid.points[static_cast<std::size_t>(cf_dec.sampled)];

        LearnerInput input;
        input.state_history = &y_hist;
        input.response_history = &r_hist;
        input.policy_history = &p_hist;
        input.current_policy = ann.policy;
        input.published_forecast = ann.forecast;
        std::vector<double> mu = agent->respond(game, input);
        int realized = sample_index(mu, u_t);
        if (response_override) realized = (*response_override)[static_cast<std::size_t>(t)];

        TranscriptRow row;
        row.forecast_cell = ann.forecast_cell;
        row.cf_forecast_cell = cf_dec.sampled;
        row.policy = ann.policy;
        row.response = realized;
        row.response_dist = mu;
        row.oracle_context = oracle_ctx;

        for (std::size_t i = 0; i < alternatives.size(); ++i) {
            LearnerInput ci;
            ci.state_history = &y_hist;
            ci.response_history = &clone_r_hist[i];
            ci.policy_history = &clone_p_hist[i];
            ci.current_policy = alternatives[i];
            ci.published_forecast = cf_forecast;
            std::vector<double> cmu = clones[i]->respond(game, ci);
            row.cf_responses.push_back(sample_index(cmu, u_t));
            row.cf_dists.push_back(std::move(cmu));
        }

        const int y = states[static_cast<std::size_t>(t)];
        row.state = y;
        const std::size_t py = static_cast<std::size_t>(ann.policy);
        row.u_realized = game.u(static_cast<std::size_t>(realized), py, static_cast<std::size_t>(y));
        row.v_realized = game.v(static_cast<std::size_t>(realized), py, static_cast<std::size_t>(y));
        for (std::size_t r = 0; r < game.n_responses(); ++r) {
            row.u_expected += mu[r] * game.u(r, py, static_cast<std::size_t>(y));
            row.v_expected += mu[r] * game.v(r, py, static_cast<std::size_t>(y));
        }
        for (std::size_t i = 0; i < alternatives.size(); ++i) {
            const std::size_t pa = static_cast<std::size_t>(alternatives[i]);
            double ue = 0.0, ve = 0.0;
            for (std::size_t r = 0; r < game.n_responses(); ++r) {
                ue += row.cf_dists[i][r] * game.u(r, pa, static_cast<std::size_t>(y));
                ve += row.cf_dists[i][r] * game.v(r, pa, static_cast<std::size_t>(y));
            }
            row.cf_u_expected.push_back(ue);
            row.cf_v_expected.push_back(ve);
        }

        // Shadow world: the realized mechanism against the learner's own
        // self-generated responses. Keeps the oracle independent of any
        // exogenous tampering with realized responses.
        LearnerInput si;
        si.state_history = &y_hist;
        si.response_history = &shadow_r_hist;
        si.policy_history = &p_hist;
        si.current_policy = ann.policy;
        si.published_forecast = ann.forecast;
        const int shadow_r = sample_index(shadow->respond(game, si), u_t);

        mech->observe(y);
        cf_forecaster.update(grid, static_cast<std::size_t>(y));
        agent->observe(game, y);
        shadow->observe(game, y);
        for (auto& c : clones) c->observe(game, y);

        // Information bins. Response cells coincide with response indices:
        // the finite response set is its own cover.
        std::vector<int> cir_key, fcir_key;
        cir_key.push_back(ann.policy);
        fcir_key.push_back(ann.forecast_cell);
        cir_key.push_back(realized);
        fcir_key.push_back(realized);
        for (int rp : row.cf_responses) {
            cir_key.push_back(rp);
            fcir_key.push_back(rp);
        }
        auto intern = [](std::vector<int> key, std::map<std::vector<int>, int>& index,
                         std::vector<std::vector<int>>& keys) {
            auto it = index.find(key);
            if (it != index.end()) return it->second;
            const int id = static_cast<int>(keys.size());
            keys.push_back(key);
            index.emplace(std::move(key), id);
            return id;
        };
        row.cir_bin = intern(std::move(cir_key), cir_index, out.cir_bin_keys);
        row.fcir_bin = intern(std::move(fcir_key), fcir_index, out.fcir_bin_keys);

        y_hist.push_back(y);
        r_hist.push_back(realized);
        p_hist.push_back(ann.policy);
        shadow_r_hist.push_back(shadow_r);
        for (std::size_t i = 0; i < alternatives.size(); ++i) {
            clone_r_hist[i].push_back(row.cf_responses[i]);
            clone_p_hist[i].push_back(alternatives[i]);
        }
        prev_cf_forecast = cf_forecast;

        out.rows.push_back(std::move(row));
    }
    return out;
}

namespace {

void check_upto(const Transcript& t, long upto) {
    if (upto < 1 || upto > t.horizon())
        throw std::invalid_argument("transcript: prefix length out of range");
}

struct WorldView {
    int policy(const Transcript& t, const TranscriptRow& row, int world) const {
        return world < 0 ? row.policy : t.alternatives[static_cast<std::size_t>(world)];
    }
    double achieved(const TranscriptRow& row, int world) const {
        return world < 0 ? row.u_expected
                         : row.cf_u_expected[static_cast<std::size_t>(world)];
    }
    int response_cell(const TranscriptRow& row, int world) const {
        return world < 0 ? row.response : row.cf_responses[static_cast<std::size_t>(world)];
    }
};

}  // namespace

RegretResult agent_regret(const Transcript& t, RegretNotion notion, long upto, int world) {
    check_upto(t, upto);
    if (world >= static_cast<int>(t.alternatives.size()))
        throw std::invalid_argument("agent_regret: world out of range");
    const Game& game = *t.game;
    WorldView view;

    // Context id per round.
    std::vector<int> context(static_cast<std::size_t>(upto));
    for (long i = 0; i < upto; ++i) {
        const TranscriptRow& row = t.rows[static_cast<std::size_t>(i)];
        switch (notion) {
            case RegretNotion::External:
                context[static_cast<std::size_t>(i)] = view.policy(t, row, world);
                break;
            case RegretNotion::Internal:
                context[static_cast<std::size_t>(i)] =
                    view.policy(t, row, world) * static_cast<int>(game.n_responses()) +
                    view.response_cell(row, world);
                break;
            case RegretNotion::Counterfactual:
                context[static_cast<std::size_t>(i)] = row.cir_bin;
                break;
            case RegretNotion::ForecastExternal:
                context[static_cast<std::size_t>(i)] = row.forecast_cell;
                break;
            case RegretNotion::ForecastCounterfactual:
                context[static_cast<std::size_t>(i)] = row.fcir_bin;
                break;
        }
    }

    std::map<int, std::vector<long>> bins;
    for (long i = 0; i < upto; ++i) bins[context[static_cast<std::size_t>(i)]].push_back(i);

    RegretResult out;
    for (const auto& [bin, members] : bins) {
        double achieved = 0.0;
        std::vector<double> fixed(game.n_responses(), 0.0);
        Prior empirical(game.n_states(), 0.0);
        for (long i : members) {
            const TranscriptRow& row = t.rows[static_cast<std::size_t>(i)];
            const std::size_t p = static_cast<std::size_t>(view.policy(t, row, world));
            achieved += view.achieved(row, world);
            for (std::size_t r = 0; r < game.n_responses(); ++r)
                fixed[r] += game.u(r, p, static_cast<std::size_t>(row.state));
            empirical[static_cast<std::size_t>(row.state)] += 1.0;
        }
        double best = fixed[0];
        for (double x : fixed) best = std::max(best, x);
        const double n = static_cast<double>(members.size());
        RegretBinRow rowout;
        rowout.bin = bin;
        rowout.count = static_cast<long>(members.size());
        rowout.epsilon = (best - achieved) / n;
        for (double& e : empirical) e /= n;
        rowout.empirical = std::move(empirical);
        out.value += best - achieved;
        out.bins.push_back(std::move(rowout));
    }
    out.value /= static_cast<double>(upto);
    return out;
}

double principal_regret(const Transcript& t, long upto) {
    check_upto(t, upto);
    if (t.alternatives.empty())
        throw std::invalid_argument("principal_regret: no counterfactual alternatives recorded");
    double realized = 0.0;
    for (long i = 0; i < upto; ++i) realized += t.rows[static_cast<std::size_t>(i)].v_expected;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < t.alternatives.size(); ++a) {
        double alt = 0.0;
        for (long i = 0; i < upto; ++i)
            alt += t.rows[static_cast<std::size_t>(i)].cf_v_expected[a];
        best = std::max(best, alt);
    }
    return (best - realized) / static_cast<double>(upto);
}

std::vector<EmpiricalPolicyCell> empirical_structures(const Transcript& t, long upto) {
    check_upto(t, upto);
    const Game& game = *t.game;
    std::map<int, std::vector<long>> by_policy;
    for (long i = 0; i < upto; ++i)
        by_policy[t.rows[static_cast<std::size_t>(i)].policy].push_back(i);

    std::vector<EmpiricalPolicyCell> out;
    for (const auto& [policy, members] : by_policy) {
        EmpiricalPolicyCell cell;
        cell.policy = policy;
        cell.count = static_cast<long>(members.size());
        cell.empirical.assign(game.n_states(), 0.0);
        std::map<int, std::pair<long, Prior>> bins;
        for (long i : members) {
            const TranscriptRow& row = t.rows[static_cast<std::size_t>(i)];
            cell.empirical[static_cast<std::size_t>(row.state)] += 1.0;
            auto& b = bins[row.cir_bin];
            if (b.second.empty()) b.second.assign(game.n_states(), 0.0);
            b.first += 1;
            b.second[static_cast<std::size_t>(row.state)] += 1.0;
        }
        for (double& e : cell.empirical) e /= static_cast<double>(cell.count);
        for (auto& [bin, stat] : bins) {
            for (double& e : stat.second) e /= static_cast<double>(stat.first);
            cell.bins.push_back(bin);
            cell.bin_counts.push_back(stat.first);
            cell.bin_empiricals.push_back(stat.second);
        }
        cell.gamma = empirical_info_structure(cell.bin_counts, cell.bin_empiricals,
                                              cell.count, cell.empirical);
        out.push_back(std::move(cell));
    }
    return out;
}

double measured_iota(const Transcript& t, long upto, bool forecastwise_bins) {
    check_upto(t, upto);
    // Group by the conditioning context; the forecast is constant inside
    // either kind of bin because the bin key contains the forecast cell
    // (forecastwise) or is paired with it via the cell sums below.
    std::map<int, std::pair<long, Prior>> groups;
    for (long i = 0; i < upto; ++i) {
        const TranscriptRow& row = t.rows[static_cast<std::size_t>(i)];
        const int key = forecastwise_bins ? row.fcir_bin : row.forecast_cell;
        auto& g = groups[key];
        if (g.second.empty()) g.second.assign(t.game->n_states(), 0.0);
        g.first += 1;
        g.second[static_cast<std::size_t>(row.state)] += 1.0;
    }
    double iota = 0.0;
    for (auto& [key, g] : groups) {
        for (double& e : g.second) e /= static_cast<double>(g.first);
        const int cell = forecastwise_bins
                             ? t.fcir_bin_keys[static_cast<std::size_t>(key)][0]
                             : key;
        iota += static_cast<double>(g.first) *
                l1_distance(t.forecast_point(cell), g.second);
    }
    return iota / static_cast<double>(upto);
}

double measured_epsilon(const Transcript& t, long upto) {
    double eps = agent_regret(t, RegretNotion::ForecastCounterfactual, upto, -1).value;
    for (std::size_t a = 0; a < t.alternatives.size(); ++a)
        eps = std::max(eps, agent_regret(t, RegretNotion::ForecastCounterfactual, upto,
                                         static_cast<int>(a))
                                .value);
    return std::max(0.0, eps);
}

double measured_epsilon_tilde(const Transcript& t, long upto) {
    double floor = agent_regret(t, RegretNotion::ForecastExternal, upto, -1).value;
    for (std::size_t a = 0; a < t.alternatives.size(); ++a)
        floor = std::min(floor, agent_regret(t, RegretNotion::ForecastExternal, upto,
                                             static_cast<int>(a))
                                    .value);
    return std::max(0.0, -floor);
}

BoundResult theorem_bound(const Transcript& t, TheoremBound which, const BoundParams& params,
                          long upto) {
    check_upto(t, upto);
    if (which == TheoremBound::T5 && (!params.m1 || !params.m2))
        throw std::invalid_argument("theorem_bound: the T5 form requires the alignment constants");
    const Game& game = *t.game;
    BoundResult out;
    out.m1 = params.m1.value_or(0.0);
    out.m2 = params.m2.value_or(0.0);
    out.epsilon_used = params.epsilon ? *params.epsilon : measured_epsilon(t, upto);
    out.epsilon_tilde_used =
        params.epsilon_tilde ? *params.epsilon_tilde : measured_epsilon_tilde(t, upto);

    const bool forecastwise = which == TheoremBound::T4;
    out.iota_measured = measured_iota(t, upto, forecastwise);

    // Base term: count-weighted cost of robustness (T4/T5) or informational
    // robustness (T6) at the empirical distribution of each context.
    std::map<int, std::pair<long, Prior>> groups;
    for (long i = 0; i < upto; ++i) {
        const TranscriptRow& row = t.rows[static_cast<std::size_t>(i)];
        const int key = forecastwise ? row.fcir_bin : row.forecast_cell;
        auto& g = groups[key];
        if (g.second.empty()) g.second.assign(game.n_states(), 0.0);
        g.first += 1;
        g.second[static_cast<std::size_t>(row.state)] += 1.0;
    }
    for (auto& [key, g] : groups) {
        for (double& e : g.second) e /= static_cast<double>(g.first);
        const double cost = which == TheoremBound::T6
                                ? cost_of_info_robustness(game, g.second, t.mechanism.epsilon_bar)
                                : cost_of_robustness(game, g.second, t.mechanism.epsilon_bar);
        out.base_term += static_cast<double>(g.first) * cost;
    }
    out.base_term /= static_cast<double>(upto);

    const double ny = static_cast<double>(game.n_states());
    const double nf = static_cast<double>(t.grid.points.size());
    const double horizon = static_cast<double>(upto);
    const double log_nf = nf > 1.0 ? std::log(nf) : 0.0;
    if (forecastwise) {
        // The context space of the per-context forecaster: response cells to
        // the power of alternatives plus the policy cover.
        const double n_contexts =
            std::pow(static_cast<double>(game.n_responses()),
                     static_cast<double>(t.alternatives.size() + game.n_policies()));
        out.iota_apriori =
            std::pow(n_contexts / horizon, 0.25) * std::sqrt(ny * nf * std::sqrt(2.0 * log_nf)) +
            std::sqrt(2.0 * ny * t.grid.delta);
    } else {
        out.iota_apriori = apriori_miscalibration_bound(game.n_states(), t.grid.points.size(),
                                                        t.grid.delta, upto);
    }

    const double eb = t.mechanism.epsilon_bar;
    const double kur = game.k_u_response * game.delta_response;
    const double kup = game.k_u_policy * game.delta_policy;
    const double kvr = game.k_v_response * game.delta_response;
    const double kvp = game.k_v_policy * game.delta_policy;
    auto assemble = [&](double iota) {
        switch (which) {
            case TheoremBound::T4:
            case TheoremBound::T6:
                return out.base_term +
                       2.0 * (out.epsilon_used + 2.0 * iota + kur + kup) / eb +
                       (2.0 * iota + 2.0 * kvr + kvp);
            case TheoremBound::T5:
                return out.base_term +
                       (2.0 * out.epsilon_used + 6.0 * iota + 2.0 * kur + 2.0 * kup) / eb +
                       out.m1 * (2.0 * out.epsilon_used + 2.0 * out.epsilon_tilde_used +
                                 2.0 * iota + 2.0 * kup) +
                       2.0 * out.m2 + 3.0 * iota + 2.0 * kvr + kvp;
        }
        return 0.0;
    };
    out.bound_measured = assemble(out.iota_measured);
    out.bound_apriori = assemble(out.iota_apriori);
    return out;
}

}  // namespace mdlab
