#include "mdlab/scenarios.hpp"

#include <cmath>
#include <stdexcept>

namespace mdlab {

namespace {

Game persuasion_game(double policy_step, const std::vector<std::string>& states,
                     const std::vector<std::string>& responses,
                     const std::string& policy_prefix) {
    if (!(policy_step > 0.0 && policy_step <= 1.0))
        throw std::invalid_argument("persuasion builder: policy step outside (0,1]");
    const int ticks = static_cast<int>(std::lround(1.0 / policy_step));

    Game g;
    g.state_names = states;          // [guilty, innocent]
    g.response_names = responses;    // strategies over the binary message
    std::vector<double> q_innocent;  // convict-message probability when innocent
    for (int k = 0; k <= ticks; ++k) {
        const double q = static_cast<double>(k) / static_cast<double>(ticks);
        q_innocent.push_back(q);
        char name[64];
        std::snprintf(name, sizeof(name), "%s_%.4f", policy_prefix.c_str(), q);
        g.policy_names.push_back(name);
    }

    const std::size_t nr = 4, np = g.policy_names.size(), ny = 2;
    g.u_table.assign(nr * np * ny, 0.0);
    g.v_table.assign(nr * np * ny, 0.0);

    // Strategy r maps the message m in {convict_msg=1, acquit_msg=0} to an
    // action a in {convict=1, acquit=0}.
    auto action = [](std::size_t r, int convict_msg) {
        switch (r) {
            case 0: return convict_msg;        // follow_message
            case 1: return 0;                  // always_acquit
            case 2: return 1;                  // always_convict
            default: return 1 - convict_msg;   // invert_message
        }
    };
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t p = 0; p < np; ++p)
            for (std::size_t y = 0; y < ny; ++y) {
                const bool guilty = (y == 0);
                const double q_convict_msg = guilty ? 1.0 : q_innocent[p];
                double u = 0.0, v = 0.0;
                for (int m = 0; m <= 1; ++m) {
                    const double pm = (m == 1) ? q_convict_msg : 1.0 - q_convict_msg;
                    const int a = action(r, m);
                    u += pm * ((a == 1) == guilty ? 1.0 : 0.0);
                    v += pm * (a == 1 ? 1.0 : 0.0);
                }
                g.u_table[(r * np + p) * ny + y] = u;
                g.v_table[(r * np + p) * ny + y] = v;
            }

    g.response_metric.assign(nr, std::vector<double>(nr, 1.0));
    for (std::size_t r = 0; r < nr; ++r) g.response_metric[r][r] = 0.0;
    g.policy_metric.assign(np, std::vector<double>(np, 0.0));
    for (std::size_t a = 0; a < np; ++a)
        for (std::size_t b = 0; b < np; ++b)
            g.policy_metric[a][b] = 2.0 * std::fabs(q_innocent[a] - q_innocent[b]);

    g.k_u_response = g.k_v_response = g.k_u_policy = g.k_v_policy = 1.0;
    g.delta_response = 0.0;
    g.delta_policy = 2.0 * policy_step;
    g.validate();
    return g;
}

}  // namespace

Game judge_prosecutor(double policy_step) {
    return persuasion_game(policy_step, {"guilty", "innocent"},
                           {"follow_message", "always_acquit", "always_convict",
                            "invert_message"},
                           "convict_msg_if_innocent");
}

Game drug_approval(double policy_step) {
    return persuasion_game(policy_step, {"high_quality", "low_quality"},
                           {"follow_trial", "always_reject", "always_approve",
                            "invert_trial"},
                           "approve_msg_if_low");
}

double contract_payment(const ContractParams& params, int policy) {
    return static_cast<double>(policy) * params.payment_step;
}

Game contract_task(const ContractParams& params) {
    if (!(params.payment_step > 0.0) || !(params.max_payment >= params.payment_step))
        throw std::invalid_argument("contract builder: invalid payment grid");
    if (params.cost_work < params.cost_shirk)
        throw std::invalid_argument("contract builder: work must cost at least shirk");

    Game g;
    g.state_names = {"trivial", "moderate", "impossible"};
    g.response_names = {"work", "shirk"};
    const int ticks =
        static_cast<int>(std::lround(params.max_payment / params.payment_step));
    for (int k = 0; k <= ticks; ++k) {
        char name[64];
        std::snprintf(name, sizeof(name), "pay_success_%.4f", contract_payment(params, k));
        g.policy_names.push_back(name);
    }

    const std::size_t nr = 2, np = g.policy_names.size(), ny = 3;
    g.u_table.assign(nr * np * ny, 0.0);
    g.v_table.assign(nr * np * ny, 0.0);

    // state y maps action r to an outcome: trivial always succeeds,
    // impossible always fails, moderate succeeds only under work.
    auto success = [](std::size_t r, std::size_t y) {
        if (y == 0) return true;
        if (y == 2) return false;
        return r == 0;
    };
    const double c_max = std::max(params.cost_work, params.cost_shirk);
    const double b_max = std::max(params.benefit_success, params.benefit_failure);
    const double u_span = params.max_payment + c_max;
    const double v_span = b_max + params.max_payment;
    for (std::size_t p = 0; p < np; ++p) {
        const double pay_success = contract_payment(params, static_cast<int>(p));
        for (std::size_t r = 0; r < nr; ++r) {
            const double cost = (r == 0) ? params.cost_work : params.cost_shirk;
            for (std::size_t y = 0; y < ny; ++y) {
                const bool ok = success(r, y);
                const double payment = ok ? pay_success : 0.0;
                const double benefit = ok ? params.benefit_success : params.benefit_failure;
                g.u_table[(r * np + p) * ny + y] = (payment - cost + c_max) / u_span;
                g.v_table[(r * np + p) * ny + y] =
                    (benefit - payment + params.max_payment) / v_span;
            }
        }
    }

    g.response_metric = {{0.0, 1.0}, {1.0, 0.0}};
    g.policy_metric.assign(np, std::vector<double>(np, 0.0));
    for (std::size_t a = 0; a < np; ++a)
        for (std::size_t b = 0; b < np; ++b)
            g.policy_metric[a][b] =
                std::fabs(contract_payment(params, static_cast<int>(a)) -
                          contract_payment(params, static_cast<int>(b)));

    g.k_u_response = g.k_v_response = 1.0;
    g.k_u_policy = 1.0 / u_span;
    g.k_v_policy = 1.0 / v_span;
    g.delta_response = 0.0;
    g.delta_policy = params.payment_step;
    g.validate();
    return g;
}

Game builtin_game(const std::string& name) {
    if (name == "judge_prosecutor") return judge_prosecutor();
    if (name == "drug_approval") return drug_approval();
    if (name == "contract_task") return contract_task();
    throw std::invalid_argument("unknown builtin game: " + name);
}

bool is_builtin_game(const std::string& name) {
    return name == "judge_prosecutor" || name == "drug_approval" || name == "contract_task";
}

}  // namespace mdlab
