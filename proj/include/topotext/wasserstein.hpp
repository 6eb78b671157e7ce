#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "topotext/assignment.hpp"
#include "topotext/errors.hpp"
#include "topotext/numeric.hpp"
#include "topotext/persistence.hpp"

namespace topotext {

// L-infinity ground distance on the birth/death plane.
inline double ground_distance(const Bar& a, const Bar& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

// L-infinity distance from a point to its diagonal projection.
inline double diagonal_distance(const Bar& a) { return (a.death - a.birth) / 2.0; }

// p-Wasserstein distance between two single-dimension diagram slices, solved
// exactly: each side is augmented with the other side's diagonal projections
// and the resulting square assignment problem is matched optimally.
// Both inputs must be finite; cap infinite bars first (normalize_infinite).
inline double wasserstein_distance(std::span<const Bar> a, std::span<const Bar> b,
                                   double p = 1.0) {
    if (!(p >= 1.0)) throw validation_error("wasserstein order p must be >= 1");
    for (const Bar& x : a)
        if (!std::isfinite(x.birth) || !std::isfinite(x.death))
            throw validation_error("wasserstein input contains an infinite coordinate");
    for (const Bar& x : b)
        if (!std::isfinite(x.birth) || !std::isfinite(x.death))
            throw validation_error("wasserstein input contains an infinite coordinate");

    const std::size_t m = a.size(), k = b.size(), n = m + k;
    if (n == 0) return 0.0;

    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        const double diag = std::pow(diagonal_distance(a[i]), p);
        for (std::size_t j = 0; j < k; ++j) cost[i][j] = std::pow(ground_distance(a[i], b[j]), p);
        for (std::size_t j = k; j < n; ++j) cost[i][j] = diag; // any diagonal slot
    }
    for (std::size_t j = 0; j < k; ++j) {
        const double diag = std::pow(diagonal_distance(b[j]), p);
        for (std::size_t i = m; i < n; ++i) cost[i][j] = diag;
        // diagonal-to-diagonal stays 0
    }

    return std::pow(assignment_cost(cost), 1.0 / p);
}

inline double wasserstein_distance(const std::vector<Bar>& a, const std::vector<Bar>& b,
                                   double p = 1.0) {
    return wasserstein_distance(std::span<const Bar>(a), std::span<const Bar>(b), p);
}

// Replaces every infinite death in the diagram by cap; everything else is
// unchanged. cap must dominate every finite coordinate already present.
inline PersistenceDiagram normalize_infinite(PersistenceDiagram d, double cap) {
    auto walk = [&](std::vector<Bar>& bars) {
        for (Bar& b : bars) {
            if (!std::isfinite(b.birth))
                throw validation_error("diagram has an infinite birth");
            if (b.birth > cap || (std::isfinite(b.death) && b.death > cap))
                throw validation_error("cap " + format_value(cap) +
                                       " is below a finite diagram coordinate");
            if (b.is_infinite()) b.death = cap;
        }
    };
    walk(d.dim0);
    walk(d.dim1);
    return d;
}

} // namespace topotext
