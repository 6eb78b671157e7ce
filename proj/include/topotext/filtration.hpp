#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "topotext/distance_matrix.hpp"
#include "topotext/errors.hpp"
#include "topotext/numeric.hpp"

namespace topotext {

// Vertex, edge, or triangle of the Rips filtration. diameter is the largest
// pairwise distance among the vertices (0 for a vertex).
struct Simplex {
    std::array<std::uint32_t, 3> verts{0, 0, 0};
    std::uint8_t dim = 0;
    double diameter = 0.0;

    std::span<const std::uint32_t> vertices() const { return {verts.data(), std::size_t(dim) + 1}; }
};

// Filtration order: diameter ascending, then dimension ascending, then
// lexicographic vertex order. Every face of a simplex precedes it.
inline bool filtration_less(const Simplex& a, const Simplex& b) {
    if (a.diameter != b.diameter) return a.diameter < b.diameter;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.verts < b.verts;
}

// All simplices of dimension <= max_dim + 1 with diameter <= max_scale,
// in filtration order. The extra dimension is what kills max_dim-cycles.
inline std::vector<Simplex> build_filtration(const DistanceMatrix& dist, int max_dim,
                                             double max_scale = kInf) {
    if (max_dim != 0 && max_dim != 1)
        throw validation_error("max_dim must be 0 or 1");
    dist.validate();

    const std::uint32_t n = static_cast<std::uint32_t>(dist.size());
    std::vector<Simplex> out;

    for (std::uint32_t v = 0; v < n; ++v)
        out.push_back({{v, 0, 0}, 0, 0.0});

    for (std::uint32_t u = 0; u < n; ++u)
        for (std::uint32_t v = u + 1; v < n; ++v) {
            const double d = dist(u, v);
            if (d <= max_scale) out.push_back({{u, v, 0}, 1, d});
        }

    if (max_dim == 1) {
        for (std::uint32_t u = 0; u < n; ++u)
            for (std::uint32_t v = u + 1; v < n; ++v) {
                const double duv = dist(u, v);
                if (duv > max_scale) continue;
                for (std::uint32_t w = v + 1; w < n; ++w) {
                    const double d = std::max({duv, dist(u, w), dist(v, w)});
                    if (d <= max_scale) out.push_back({{u, v, w}, 2, d});
                }
            }
    }

    std::sort(out.begin(), out.end(), filtration_less);
    return out;
}

} // namespace topotext
