#pragma once

#include <string>

#include "mdlab/game.hpp"

namespace mdlab {

/// Persuasion game between an informed sender and a 0-1-loss receiver.
/// States are ordered [guilty, innocent]. Responses are the four
/// message-to-action strategies, ordered [follow_message, always_acquit,
/// always_convict, invert_message]. Policy k sends the convict message with
/// probability 1 when guilty and k*policy_step when innocent, so policy 0 is
/// full transparency.
Game judge_prosecutor(double policy_step = 0.05);

/// Same game with the drug-approval labels from the running example.
Game drug_approval(double policy_step = 0.05);

struct ContractParams {
    double cost_work = 1.0;
    double cost_shirk = 0.0;
    double benefit_success = 2.0;
    double benefit_failure = 0.0;
    double max_payment = 4.0;
    double payment_step = 0.2;
};

/// Limited-liability moral hazard task. States [trivial, moderate,
/// impossible] map actions to outcomes; responses [work, shirk]; policy k
/// pays k*payment_step on success and nothing on failure. Utilities are
/// affinely normalized into [0,1].
Game contract_task(const ContractParams& params = {});

/// Raw payment a contract policy index corresponds to.
double contract_payment(const ContractParams& params, int policy);

/// Builder by name for the CLI: "judge_prosecutor", "drug_approval",
/// "contract_task". Throws std::invalid_argument on unknown names.
Game builtin_game(const std::string& name);
bool is_builtin_game(const std::string& name);

}  // namespace mdlab
