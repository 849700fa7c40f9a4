#pragma once

#include <limits>
#include <vector>

namespace mdlab {

enum class LpRelation { LessEqual, Equal, GreaterEqual };
enum class LpSense { Minimize, Maximize };
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpConstraint {
    std::vector<double> coefficients;
    LpRelation relation = LpRelation::LessEqual;
    double rhs = 0.0;
};

struct LpBounds {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
};

/// Small dense linear program. Every constraint row must have the same
/// dimension as the objective; variable bounds may be infinite on either side.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<LpConstraint> constraints;
    std::vector<LpBounds> variable_bounds;  // empty means x >= 0 for all
    LpSense sense = LpSense::Minimize;
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    std::vector<double> witness;  // primal vector in the original variables
};

/// Two-phase dense simplex with Bland's rule. Deterministic: identical inputs
/// give bit-identical solutions. Throws std::invalid_argument on ragged rows
/// and std::domain_error on non-finite coefficients.
LpSolution solve(const LinearProgram& lp);

/// Feasibility tolerance used when classifying solutions (absolute; utilities
/// in this artifact live in [0,1]).
inline constexpr double kLpFeasTol = 1e-9;

}  // namespace mdlab
