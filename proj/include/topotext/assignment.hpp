#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "topotext/errors.hpp"

namespace topotext {

// Exact minimum-cost perfect matching on a square cost matrix (Hungarian
// algorithm, shortest-augmenting-path form with potentials, O(n^3)).
// Returns the assignment as row -> column.
inline std::vector<std::size_t> solve_assignment(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    if (n == 0) return {};
    for (const auto& row : cost)
        if (row.size() != n) throw validation_error("assignment cost matrix must be square");

    const double inf = std::numeric_limits<double>::infinity();
    // 1-based with a virtual row/column 0, as in the classic formulation.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);

    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::size_t> row_to_col(n, 0);
    for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

inline double assignment_cost(const std::vector<std::vector<double>>& cost) {
    const auto match = solve_assignment(cost);
    double total = 0.0;
    for (std::size_t i = 0; i < match.size(); ++i) total += cost[i][match[i]];
    return total;
}

} // namespace topotext
