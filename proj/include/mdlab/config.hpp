#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdlab/engine.hpp"
#include "mdlab/game.hpp"
#include "mdlab/learners.hpp"
#include "mdlab/mechanisms.hpp"

namespace mdlab {

using json = nlohmann::ordered_json;

/// Schema violation with the offending field path in the message.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& message)
        : std::runtime_error("config error at '" + path + "': " + message), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct StateGenerator {
    enum class Kind { Iid, Scripted, Markov };
    Kind kind = Kind::Iid;
    Prior probabilities;                           // iid
    std::vector<int> script;                       // scripted (inline or loaded from file)
    std::string script_file;                       // original file reference, if any
    std::vector<std::vector<double>> transition;   // markov
    Prior initial;                                 // markov

    std::vector<int> generate(std::size_t n_states, long horizon, std::uint64_t seed) const;
    void validate(std::size_t n_states, long horizon) const;
};

struct ExperimentConfig {
    std::string game_builtin;  // one of the scenario library names
    std::string game_file;     // or a game document path
    json game_inline;          // or an inline game object

    MechanismSpec mechanism;
    LearnerSpec learner;
    StateGenerator states;
    long horizon = 1;
    std::vector<std::uint64_t> seeds;
    std::vector<long> checkpoints;
    BoundParams bound_params;
    bool bound_params_present = false;
};

Game game_from_json(const json& j);
json game_to_json(const Game& game);
Game load_game(const std::string& path_or_builtin);

ExperimentConfig parse_config(const json& j);
json serialize_config(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

/// Builds the game named by the config (builtin, file, or inline).
Game build_game(const ExperimentConfig& config);

}  // namespace mdlab
