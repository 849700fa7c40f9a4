#include "mdlab/config.hpp"

#include <fstream>
#include <sstream>

#include "mdlab/scenarios.hpp"

namespace mdlab {

namespace {

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(path + "." + key, "missing required field");
    return *it;
}

double require_number(const json& j, const std::string& key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
    return v.get<double>();
}

long require_integer(const json& j, const std::string& key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
    return v.get<long>();
}

std::string require_string(const json& j, const std::string& key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_string()) throw ConfigError(path + "." + key, "expected a string");
    return v.get<std::string>();
}

Prior number_array(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
    Prior out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(path, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<int> int_array(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array of integers");
    std::vector<int> out;
    for (const auto& x : v) {
        if (!x.is_number_integer()) throw ConfigError(path, "expected an array of integers");
        out.push_back(x.get<int>());
    }
    return out;
}

}  // namespace

Game game_from_json(const json& j) {
    Game g;
    const std::string path = "game";
    for (const auto& name : require(j, "states", path)) g.state_names.push_back(name.get<std::string>());
    for (const auto& name : require(j, "responses", path)) g.response_names.push_back(name.get<std::string>());
    for (const auto& name : require(j, "policies", path)) g.policy_names.push_back(name.get<std::string>());
    const std::size_t ny = g.state_names.size(), nr = g.response_names.size(), np = g.policy_names.size();

    auto read_table = [&](const char* key, std::vector<double>& out) {
        const json& t = require(j, key, path);
        if (!t.is_array() || t.size() != nr)
            throw ConfigError(path + "." + key, "expected one row block per response");
        for (std::size_t r = 0; r < nr; ++r) {
            if (!t[r].is_array() || t[r].size() != np)
                throw ConfigError(path + "." + key, "expected one row per policy");
            for (std::size_t p = 0; p < np; ++p) {
                const Prior row = number_array(t[r][p], path + "." + key);
                if (row.size() != ny)
                    throw ConfigError(path + "." + key, "expected one entry per state");
                for (std::size_t y = 0; y < ny; ++y) out.push_back(row[y]);
            }
        }
    };
    read_table("u", g.u_table);
    read_table("v", g.v_table);

    auto read_metric = [&](const char* key, std::size_t n) {
        const json& m = require(j, key, path);
        std::vector<std::vector<double>> out;
        if (!m.is_array() || m.size() != n) throw ConfigError(path + "." + key, "metric size mismatch");
        for (const auto& row : m) out.push_back(number_array(row, path + "." + key));
        return out;
    };
    g.response_metric = read_metric("response_metric", nr);
    g.policy_metric = read_metric("policy_metric", np);

    const json& lip = require(j, "lipschitz", path);
    g.k_u_response = require_number(lip, "u_response", path + ".lipschitz");
    g.k_u_policy = require_number(lip, "u_policy", path + ".lipschitz");
    g.k_v_response = require_number(lip, "v_response", path + ".lipschitz");
    g.k_v_policy = require_number(lip, "v_policy", path + ".lipschitz");
    const json& radii = require(j, "cover_radii", path);
    g.delta_response = require_number(radii, "response", path + ".cover_radii");
    g.delta_policy = require_number(radii, "policy", path + ".cover_radii");
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    return g;
}

json game_to_json(const Game& g) {
    json j;
    j["states"] = g.state_names;
    j["responses"] = g.response_names;
    j["policies"] = g.policy_names;
    auto write_table = [&](const std::vector<double>& table) {
        json rows = json::array();
        for (std::size_t r = 0; r < g.n_responses(); ++r) {
            json per_policy = json::array();
            for (std::size_t p = 0; p < g.n_policies(); ++p) {
                json per_state = json::array();
                for (std::size_t y = 0; y < g.n_states(); ++y)
                    per_state.push_back(table[(r * g.n_policies() + p) * g.n_states() + y]);
                per_policy.push_back(per_state);
            }
            rows.push_back(per_policy);
        }
        return rows;
    };
    j["u"] = write_table(g.u_table);
    j["v"] = write_table(g.v_table);
    j["response_metric"] = g.response_metric;
    j["policy_metric"] = g.policy_metric;
    j["lipschitz"] = {{"u_response", g.k_u_response},
                      {"u_policy", g.k_u_policy},
                      {"v_response", g.k_v_response},
                      {"v_policy", g.k_v_policy}};
    j["cover_radii"] = {{"response", g.delta_response}, {"policy", g.delta_policy}};
    return j;
}

Game load_game(const std::string& path_or_builtin) {
    if (is_builtin_game(path_or_builtin)) return builtin_game(path_or_builtin);
    std::ifstream in(path_or_builtin);
    if (!in) throw ConfigError("game", "cannot open game file: " + path_or_builtin);
    json j;
    in >> j;
    return game_from_json(j);
}

std::vector<int> StateGenerator::generate(std::size_t n_states, long horizon,
                                          std::uint64_t seed) const {
    validate(n_states, horizon);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(horizon));
    switch (kind) {
        case Kind::Iid:
            for (long t = 0; t < horizon; ++t)
                out.push_back(sample_index(probabilities,
                                           unit_draw(seed, static_cast<std::uint64_t>(t))));
            break;
        case Kind::Scripted:
            out.assign(script.begin(), script.begin() + horizon);
            break;
        case Kind::Markov: {
            int y = sample_index(initial, unit_draw(seed, 0));
            out.push_back(y);
            for (long t = 1; t < horizon; ++t) {
                y = sample_index(transition[static_cast<std::size_t>(y)],
                                 unit_draw(seed, static_cast<std::uint64_t>(t)));
                out.push_back(y);
            }
            break;
        }
    }
    return out;
}

void StateGenerator::validate(std::size_t n_states, long horizon) const {
    switch (kind) {
        case Kind::Iid:
            if (probabilities.size() != n_states || !is_distribution(probabilities))
                throw ConfigError("states.probabilities", "must be a distribution over the game states");
            break;
        case Kind::Scripted:
            if (static_cast<long>(script.size()) < horizon)
                throw ConfigError("states.states", "script shorter than the horizon T");
            for (int y : script)
                if (y < 0 || y >= static_cast<int>(n_states))
                    throw ConfigError("states.states", "state index out of range");
            break;
        case Kind::Markov:
            if (initial.size() != n_states || !is_distribution(initial))
                throw ConfigError("states.initial", "must be a distribution over the game states");
            if (transition.size() != n_states)
                throw ConfigError("states.transition", "must have one row per state");
            for (const auto& row : transition)
                if (row.size() != n_states || !is_distribution(row))
                    throw ConfigError("states.transition", "each row must be a distribution");
            break;
    }
}

namespace {

MechanismSpec parse_mechanism(const json& j) {
    const std::string path = "mechanism";
    MechanismSpec spec;
    const std::string kind = require_string(j, "kind", path);
    if (kind == "constant")
        spec.kind = MechanismKind::Constant;
    else if (kind == "m1")
        spec.kind = MechanismKind::M1;
    else if (kind == "m2")
        spec.kind = MechanismKind::M2;
    else if (kind == "m3")
        spec.kind = MechanismKind::M3;
    else
        throw ConfigError(path + ".kind", "expected constant|m1|m2|m3");
    if (spec.kind == MechanismKind::Constant)
        spec.fixed_policy = static_cast<int>(require_integer(j, "fixed_policy", path));
    else
        spec.epsilon_bar = require_number(j, "epsilon_bar", path);
    if (j.contains("forecast_delta")) spec.forecast_delta = j["forecast_delta"].get<double>();
    if (j.contains("forecast_points")) {
        const json& pts = j["forecast_points"];
        if (!pts.is_array()) throw ConfigError(path + ".forecast_points", "expected an array");
        for (const auto& p : pts)
            spec.forecast_points.push_back(number_array(p, path + ".forecast_points"));
    }
    if (j.contains("alternatives")) spec.alternatives = int_array(j["alternatives"], path + ".alternatives");
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    return spec;
}

LearnerSpec parse_learner(const json& j) {
    const std::string path = "learner";
    LearnerSpec spec;
    const std::string kind = require_string(j, "kind", path);
    if (kind == "cfl")
        spec.kind = LearnerKind::Cfl;
    else if (kind == "exp_weights")
        spec.kind = LearnerKind::ExpWeightsPerContext;
    else if (kind == "fixed_prior_bayes")
        spec.kind = LearnerKind::FixedPriorBayes;
    else if (kind == "selective_superefficiency")
        spec.kind = LearnerKind::SelectiveSuperefficiency;
    else if (kind == "selective_superinefficiency")
        spec.kind = LearnerKind::SelectiveSuperinefficiency;
    else
        throw ConfigError(path + ".kind",
                          "expected cfl|exp_weights|fixed_prior_bayes|selective_superefficiency|"
                          "selective_superinefficiency");
    if (j.contains("eta")) spec.eta = j["eta"].get<double>();
    if (j.contains("prior")) spec.fixed_prior = number_array(j["prior"], path + ".prior");
    if (j.contains("script")) spec.scripted_states = int_array(j["script"], path + ".script");
    if (j.contains("trigger_states"))
        spec.trigger_states = int_array(j["trigger_states"], path + ".trigger_states");
    if (j.contains("trigger_policies"))
        spec.trigger_policies = int_array(j["trigger_policies"], path + ".trigger_policies");
    if (j.contains("q")) spec.mix_q = j["q"].get<double>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    return spec;
}

StateGenerator parse_states(const json& j) {
    const std::string path = "states";
    StateGenerator gen;
    const std::string kind = require_string(j, "kind", path);
    if (kind == "iid") {
        gen.kind = StateGenerator::Kind::Iid;
        gen.probabilities = number_array(require(j, "probabilities", path), path + ".probabilities");
    } else if (kind == "scripted") {
        gen.kind = StateGenerator::Kind::Scripted;
        if (j.contains("file")) {
            gen.script_file = j["file"].get<std::string>();
            std::ifstream in(gen.script_file);
            if (!in) throw ConfigError(path + ".file", "cannot open script file: " + gen.script_file);
            int y;
            while (in >> y) gen.script.push_back(y);
        } else {
            gen.script = int_array(require(j, "states", path), path + ".states");
        }
    } else if (kind == "markov") {
        gen.kind = StateGenerator::Kind::Markov;
        gen.initial = number_array(require(j, "initial", path), path + ".initial");
        const json& t = require(j, "transition", path);
        if (!t.is_array()) throw ConfigError(path + ".transition", "expected an array of rows");
        for (const auto& row : t) gen.transition.push_back(number_array(row, path + ".transition"));
    } else {
        throw ConfigError(path + ".kind", "expected iid|scripted|markov");
    }
    return gen;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig c;
    const json& game = require(j, "game", "");
    if (game.is_object() && game.contains("builtin"))
        c.game_builtin = game["builtin"].get<std::string>();
    else if (game.is_object() && game.contains("file"))
        c.game_file = game["file"].get<std::string>();
    else if (game.is_object() && game.contains("states"))
        c.game_inline = game;
    else
        throw ConfigError("game", "expected builtin, file, or an inline game object");

    c.mechanism = parse_mechanism(require(j, "mechanism", ""));
    c.learner = parse_learner(require(j, "learner", ""));
    c.states = parse_states(require(j, "states", ""));
    c.horizon = require_integer(j, "T", "");
    if (c.horizon < 1) throw ConfigError("T", "horizon must be >= 1");
    for (const auto& s : require(j, "seeds", "")) {
        if (!s.is_number_integer()) throw ConfigError("seeds", "expected integers");
        c.seeds.push_back(s.get<std::uint64_t>());
    }
    if (c.seeds.empty()) throw ConfigError("seeds", "at least one seed required");
    if (j.contains("checkpoints")) {
        for (const auto& x : j["checkpoints"]) c.checkpoints.push_back(x.get<long>());
    } else {
        c.checkpoints.push_back(c.horizon);
    }
    for (long cp : c.checkpoints)
        if (cp < 1 || cp > c.horizon)
            throw ConfigError("checkpoints", "checkpoints must lie in [1, T]");
    if (j.contains("bound_params")) {
        c.bound_params_present = true;
        const json& b = j["bound_params"];
        if (b.contains("epsilon") && !b["epsilon"].is_null())
            c.bound_params.epsilon = b["epsilon"].get<double>();
        if (b.contains("epsilon_tilde") && !b["epsilon_tilde"].is_null())
            c.bound_params.epsilon_tilde = b["epsilon_tilde"].get<double>();
        if (b.contains("m1")) c.bound_params.m1 = b["m1"].get<double>();
        if (b.contains("m2")) c.bound_params.m2 = b["m2"].get<double>();
    }
    // The harness always evaluates a bound row per run, so missing alignment
    // constants degrade to zero rather than failing the whole experiment.
    if (!c.bound_params.m1) c.bound_params.m1 = 0.0;
    if (!c.bound_params.m2) c.bound_params.m2 = 0.0;
    return c;
}

json serialize_config(const ExperimentConfig& c) {
    json j;
    if (!c.game_builtin.empty())
        j["game"] = {{"builtin", c.game_builtin}};
    else if (!c.game_file.empty())
        j["game"] = {{"file", c.game_file}};
    else
        j["game"] = c.game_inline;

    json mech;
    mech["kind"] = mechanism_kind_name(c.mechanism.kind);
    if (c.mechanism.kind == MechanismKind::Constant)
        mech["fixed_policy"] = c.mechanism.fixed_policy;
    else
        mech["epsilon_bar"] = c.mechanism.epsilon_bar;
    mech["forecast_delta"] = c.mechanism.forecast_delta;
    if (!c.mechanism.forecast_points.empty())
        mech["forecast_points"] = c.mechanism.forecast_points;
    if (!c.mechanism.alternatives.empty()) mech["alternatives"] = c.mechanism.alternatives;
    mech["seed"] = c.mechanism.seed;
    j["mechanism"] = mech;

    json lrn;
    lrn["kind"] = learner_kind_name(c.learner.kind);
    if (c.learner.kind == LearnerKind::ExpWeightsPerContext) lrn["eta"] = c.learner.eta;
    if (!c.learner.fixed_prior.empty()) lrn["prior"] = c.learner.fixed_prior;
    if (!c.learner.scripted_states.empty()) lrn["script"] = c.learner.scripted_states;
    if (!c.learner.trigger_states.empty()) lrn["trigger_states"] = c.learner.trigger_states;
    if (!c.learner.trigger_policies.empty()) lrn["trigger_policies"] = c.learner.trigger_policies;
    if (c.learner.mix_q >= 0.0) lrn["q"] = c.learner.mix_q;
    lrn["seed"] = c.learner.seed;
    j["learner"] = lrn;

    json st;
    switch (c.states.kind) {
        case StateGenerator::Kind::Iid:
            st["kind"] = "iid";
            st["probabilities"] = c.states.probabilities;
            break;
        case StateGenerator::Kind::Scripted:
            st["kind"] = "scripted";
            if (!c.states.script_file.empty())
                st["file"] = c.states.script_file;
            else
                st["states"] = c.states.script;
            break;
        case StateGenerator::Kind::Markov:
            st["kind"] = "markov";
            st["initial"] = c.states.initial;
            st["transition"] = c.states.transition;
            break;
    }
    j["states"] = st;
    j["T"] = c.horizon;
    j["seeds"] = c.seeds;
    j["checkpoints"] = c.checkpoints;
    if (c.bound_params_present) {
        json b;
        if (c.bound_params.epsilon)
            b["epsilon"] = *c.bound_params.epsilon;
        else
            b["epsilon"] = nullptr;
        if (c.bound_params.epsilon_tilde)
            b["epsilon_tilde"] = *c.bound_params.epsilon_tilde;
        else
            b["epsilon_tilde"] = nullptr;
        b["m1"] = c.bound_params.m1.value_or(0.0);
        b["m2"] = c.bound_params.m2.value_or(0.0);
        j["bound_params"] = b;
    }
    return j;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

Game build_game(const ExperimentConfig& c) {
    if (!c.game_builtin.empty()) {
        if (!is_builtin_game(c.game_builtin))
            throw ConfigError("game.builtin", "unknown builtin game: " + c.game_builtin);
        return builtin_game(c.game_builtin);
    }
    if (!c.game_file.empty()) return load_game(c.game_file);
    return game_from_json(c.game_inline);
}

}  // namespace mdlab
