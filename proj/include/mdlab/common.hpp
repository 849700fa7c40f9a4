#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdlab {

using Prior = std::vector<double>;

// Counter-based generator: the t-th draw depends only on (seed, t), never on
// how many draws were taken before. Clones sharing a seed see identical
// streams, which is what the counterfactual replay machinery relies on.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

// Uniform draw in [0, 1).
inline double unit_draw(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(mix64(seed, counter) >> 11) * 0x1.0p-53;
}

// Inverse-CDF sample from a discrete distribution; mass shortfalls from
// rounding fall through to the last index.
inline int sample_index(const std::vector<double>& probs, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

inline double l1_distance(const Prior& a, const Prior& b) {
    if (a.size() != b.size()) throw std::invalid_argument("l1_distance: dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::fabs(a[i] - b[i]);
    return d;
}

inline bool is_distribution(const Prior& p, double tol = 1e-9) {
    double s = 0.0;
    for (double x : p) {
        if (!std::isfinite(x) || x < -tol) return false;
        s += x;
    }
    return std::fabs(s - 1.0) <= tol;
}

inline Prior uniform_prior(std::size_t n) {
    return Prior(n, 1.0 / static_cast<double>(n));
}

// All ways of writing `total` as an ordered sum of `parts` non-negative
// integers; used by the simplex lattices and the grid oracle.
std::vector<std::vector<int>> compositions(int total, int parts);

// Shortest decimal form that round-trips a double; keeps CSV output stable.
std::string format_double(double x);

}  // namespace mdlab
