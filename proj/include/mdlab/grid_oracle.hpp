#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mdlab {

enum class OracleSense { Minimize, Maximize };

/// One scaled simplex: `dimension` coordinates >= 0 summing to `scale`.
struct SimplexBlock {
    int dimension = 1;
    double scale = 1.0;
};

struct OracleResult {
    bool feasible = false;
    double value = 0.0;
    std::vector<double> point;
};

namespace detail {

template <class Objective, class Feasible>
struct GridBest {
    bool found = false;
    double value = 0.0;
    std::vector<double> point;

    void consider(double v, const std::vector<double>& coords, OracleSense sense) {
        const bool better =
            !found || (sense == OracleSense::Maximize ? v > value : v < value);
        if (better) {
            found = true;
            value = v;
            point = coords;
        }
    }
};

// Enumerates the tail of the point lazily: position `pos` inside block `blk`
// with `remain` grid ticks left in the block. Lexicographic order, so the
// first optimum encountered is the lowest-index one.
template <class Objective, class Feasible>
void enumerate_tail(const std::vector<SimplexBlock>& blocks, long ticks, double step,
                    std::size_t blk, std::size_t pos, long remain,
                    std::vector<double>& coords, std::size_t offset,
                    const Objective& objective, const Feasible& feasible,
                    OracleSense sense, GridBest<Objective, Feasible>& best) {
    const SimplexBlock& b = blocks[blk];
    const std::size_t d = static_cast<std::size_t>(b.dimension);
    if (pos + 1 == d) {
        coords[offset + pos] = b.scale * static_cast<double>(remain) * step;
        if (blk + 1 == blocks.size()) {
            if (feasible(coords))
                best.consider(objective(coords), coords, sense);
        } else {
            enumerate_tail(blocks, ticks, step, blk + 1, 0, ticks, coords,
                           offset + d, objective, feasible, sense, best);
        }
        return;
    }
    for (long k = 0; k <= remain; ++k) {
        coords[offset + pos] = b.scale * static_cast<double>(k) * step;
        enumerate_tail(blocks, ticks, step, blk, pos + 1, remain - k, coords, offset,
                       objective, feasible, sense, best);
    }
}

}  // namespace detail

/// Exhaustive search over a product of scaled simplex grids with coordinates
/// that are multiples of `step` (times the block scale). The parallel variant
/// splits on the first coordinate and merges per-chunk optima in order, so it
/// returns exactly the serial result.
template <class Objective, class Feasible>
OracleResult grid_search(const std::vector<SimplexBlock>& blocks, double step,
                         const Objective& objective, const Feasible& feasible,
                         OracleSense sense, bool parallel) {
    if (blocks.empty()) throw std::invalid_argument("grid_search: no blocks");
    if (step < 1e-3 - 1e-12) throw std::invalid_argument("grid_search: step below 1e-3");
    std::size_t total_dim = 0;
    for (const auto& b : blocks) {
        if (b.dimension < 1 || b.dimension > 4)
            throw std::invalid_argument("grid_search: block dimension must be in [1,4]");
        if (!(b.scale >= 0.0) || !std::isfinite(b.scale))
            throw std::invalid_argument("grid_search: invalid block scale");
        total_dim += static_cast<std::size_t>(b.dimension);
    }
    const long ticks = std::lround(1.0 / step);
    const double eff_step = 1.0 / static_cast<double>(ticks);

    using Best = detail::GridBest<Objective, Feasible>;
    const long first_range = (blocks[0].dimension == 1) ? 0 : ticks;
    std::vector<Best> chunk(static_cast<std::size_t>(first_range) + 1);

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long k0 = 0; k0 <= first_range; ++k0) {
        std::vector<double> coords(total_dim, 0.0);
        Best& local = chunk[static_cast<std::size_t>(k0)];
        if (blocks[0].dimension == 1) {
            coords[0] = blocks[0].scale;
            if (blocks.size() == 1) {
                if (feasible(coords)) local.consider(objective(coords), coords, sense);
            } else {
                detail::enumerate_tail(blocks, ticks, eff_step, 1, 0, ticks, coords,
                                       1, objective, feasible, sense, local);
            }
        } else {
            coords[0] = blocks[0].scale * static_cast<double>(k0) * eff_step;
            detail::enumerate_tail(blocks, ticks, eff_step, 0, 1, ticks - k0, coords,
                                   0, objective, feasible, sense, local);
        }
    }

    OracleResult out;
    for (const Best& b : chunk) {
        if (!b.found) continue;
        const bool better = !out.feasible ||
                            (sense == OracleSense::Maximize ? b.value > out.value
                                                            : b.value < out.value);
        if (better) {
            out.feasible = true;
            out.value = b.value;
            out.point = b.point;
        }
    }
    return out;
}

/// Single unit simplex, the form most validation oracles use.
template <class Objective, class Feasible>
OracleResult grid_oracle(const Objective& objective, const Feasible& feasible,
                         int dimension, double step,
                         OracleSense sense = OracleSense::Maximize,
                         bool parallel = true) {
    return grid_search({SimplexBlock{dimension, 1.0}}, step, objective, feasible, sense,
                       parallel);
}

}  // namespace mdlab
