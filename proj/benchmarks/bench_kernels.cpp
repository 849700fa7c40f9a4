// Timing comparison between the serial reference kernels and their
// OpenMP-parallel variants. Both paths must return identical results; the
// equivalence itself is asserted in the test suite, this binary just reports
// throughput.
#include <chrono>
#include <cstdio>

#include "mdlab/grid_oracle.hpp"
#include "mdlab/info.hpp"
#include "mdlab/scenarios.hpp"
#include "mdlab/stage.hpp"

using namespace mdlab;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

template <class F>
double time_call(const F& f, int repeats) {
    f();  // warm-up: thread pool wake-up and caches
    auto start = clock_type::now();
    for (int i = 0; i < repeats; ++i) f();
    return seconds_since(start) / repeats;
}

}  // namespace

int main() {
    Game jp = judge_prosecutor(0.05);
    const Prior third = {1.0 / 3.0, 2.0 / 3.0};

    std::printf("%-44s %10s %10s %8s\n", "kernel", "serial[s]", "openmp[s]", "speedup");

    {
        // Worst-case response-distribution search at step 1e-3: the dominant
        // enumeration cost in the oracle cross-checks.
        std::vector<double> eu(4), ev(4);
        double best = 0.0;
        for (std::size_t r = 0; r < 4; ++r) {
            eu[r] = jp.expected_u(r, 10, third);
            ev[r] = jp.expected_v(r, 10, third);
            best = std::max(best, eu[r]);
        }
        auto obj = [&](const std::vector<double>& mu) {
            return mu[0] * ev[0] + mu[1] * ev[1] + mu[2] * ev[2] + mu[3] * ev[3];
        };
        auto feas = [&](const std::vector<double>& mu) {
            return mu[0] * eu[0] + mu[1] * eu[1] + mu[2] * eu[2] + mu[3] * eu[3] >=
                   best - 0.1 - 1e-12;
        };
        OracleResult rs, rp;
        const double ts = time_call(
            [&]() { rs = grid_oracle(obj, feas, 4, 2e-3, OracleSense::Minimize, false); }, 3);
        const double tp = time_call(
            [&]() { rp = grid_oracle(obj, feas, 4, 2e-3, OracleSense::Minimize, true); }, 3);
        std::printf("%-44s %10.4f %10.4f %7.2fx  (values %.6f / %.6f)\n",
                    "mu grid oracle, dim 4, step 2e-3", ts, tp, ts / tp, rs.value, rp.value);
    }

    {
        // Recommendation-form search over two scaled blocks.
        auto obj = [&](const std::vector<double>& x) {
            double s = 0.0;
            for (std::size_t y = 0; y < 2; ++y)
                for (std::size_t r = 0; r < 4; ++r) s += x[y * 4 + r] * jp.v(r, 0, y);
            return s;
        };
        auto feas = [&](const std::vector<double>& x) {
            double slack = 0.0;
            for (std::size_t r = 0; r < 4; ++r) {
                double worst = 0.0;
                for (std::size_t rr = 0; rr < 4; ++rr) {
                    double gap = 0.0;
                    for (std::size_t y = 0; y < 2; ++y)
                        gap += x[y * 4 + r] * (jp.u(rr, 0, y) - jp.u(r, 0, y));
                    worst = std::max(worst, gap);
                }
                slack += worst;
            }
            return slack <= 0.1 + 1e-12;
        };
        const std::vector<SimplexBlock> blocks = {{4, third[0]}, {4, third[1]}};
        OracleResult rs, rp;
        const double ts = time_call(
            [&]() { rs = grid_search(blocks, 0.02, obj, feas, OracleSense::Minimize, false); }, 3);
        const double tp = time_call(
            [&]() { rp = grid_search(blocks, 0.02, obj, feas, OracleSense::Minimize, true); }, 3);
        std::printf("%-44s %10.4f %10.4f %7.2fx  (values %.6f / %.6f)\n",
                    "psi grid oracle, 2x4 blocks, step 0.02", ts, tp, ts / tp, rs.value, rp.value);
    }

    {
        PolicyChoice rs, rp;
        const double ts = time_call([&]() { rs = robust_policy(jp, third, 0.1, false); }, 200);
        const double tp = time_call([&]() { rp = robust_policy(jp, third, 0.1, true); }, 200);
        std::printf("%-44s %10.6f %10.6f %7.2fx  (policy %d / %d)\n",
                    "robust policy sweep, 21 programs", ts, tp, ts / tp, rs.policy, rp.policy);
    }

    {
        double rs = 0.0, rp = 0.0;
        const double ts =
            time_call([&]() { rs = cost_of_info_robustness(jp, third, 0.0, false); }, 10);
        const double tp =
            time_call([&]() { rp = cost_of_info_robustness(jp, third, 0.0, true); }, 10);
        std::printf("%-44s %10.6f %10.6f %7.2fx  (values %.6f / %.6f)\n",
                    "informational robustness sweep", ts, tp, ts / tp, rs, rp);
    }

    return 0;
}
