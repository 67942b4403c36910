#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "errors.hpp"

namespace wristband {

struct Assignment {
    std::vector<std::size_t> perm;  // row i is matched to column perm[i]
    double cost = 0.0;
};

/// Exact minimum-cost perfect matching on a dense n x n row-major cost matrix.
///
/// Shortest augmenting paths with dual potentials (Kuhn-Munkres in the
/// Jonker-Volgenant formulation), O(n^3).
inline Assignment hungarian_assign(std::span<const double> cost, std::size_t n) {
    require(cost.size() == n * n, "hungarian_assign: cost matrix must be square");
    for (double c : cost)
        if (!std::isfinite(c)) throw ContractViolation("hungarian_assign: non-finite cost");
    if (n == 0) return {};

    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based: column 0 is the virtual source
    std::vector<double> row_pot(n + 1, 0.0), col_pot(n + 1, 0.0);
    std::vector<std::size_t> col_match(n + 1, 0), way(n + 1, 0);
    std::vector<double> min_slack(n + 1);
    std::vector<char> used(n + 1);

    for (std::size_t i = 1; i <= n; ++i) {
        col_match[0] = i;
        std::size_t j0 = 0;
        std::fill(min_slack.begin(), min_slack.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = col_match[j0];
            const double* row = cost.data() + (i0 - 1) * n;
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = row[j - 1] - row_pot[i0] - col_pot[j];
                if (cur < min_slack[j]) {
                    min_slack[j] = cur;
                    way[j] = j0;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    row_pot[col_match[j]] += delta;
                    col_pot[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
        } while (col_match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            col_match[j0] = col_match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment a;
    a.perm.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) a.perm[col_match[j] - 1] = j - 1;
    for (std::size_t i = 0; i < n; ++i) a.cost += cost[i * n + a.perm[i]];
    return a;
}

inline Assignment hungarian_assign(const std::vector<double>& cost, std::size_t n) {
    return hungarian_assign(std::span<const double>(cost), n);
}

}  // namespace wristband
