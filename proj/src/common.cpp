#include "mdlab/common.hpp"

#include <cstdio>

namespace mdlab {

namespace {

void fill_compositions(int pos, int parts, int remaining, std::vector<int>& cur,
                       std::vector<std::vector<int>>& out) {
    if (pos == parts - 1) {
        cur[static_cast<std::size_t>(pos)] = remaining;
        out.push_back(cur);
        return;
    }
    for (int k = 0; k <= remaining; ++k) {
        cur[static_cast<std::size_t>(pos)] = k;
        fill_compositions(pos + 1, parts, remaining - k, cur, out);
    }
}

}  // namespace

std::vector<std::vector<int>> compositions(int total, int parts) {
    if (parts <= 0) throw std::invalid_argument("compositions: parts must be positive");
    if (total < 0) throw std::invalid_argument("compositions: total must be non-negative");
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(parts), 0);
    fill_compositions(0, parts, total, cur, out);
    return out;
}

std::string format_double(double x) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == x) break;
    }
    return std::string(buf);
}

}  // namespace mdlab
