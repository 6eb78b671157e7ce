#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "topotext/distance_matrix.hpp"
#include "topotext/errors.hpp"
#include "topotext/numeric.hpp"
#include "topotext/union_find.hpp"

namespace topotext {

struct Bar {
    double birth = 0.0;
    double death = 0.0;

    bool is_infinite() const { return std::isinf(death); }
    double persistence() const { return death - birth; }

    friend bool operator==(const Bar&, const Bar&) = default;
};

inline bool bar_less(const Bar& a, const Bar& b) {
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.death < b.death; // +inf sorts last
}

// Multiset of (birth, death) pairs per homology dimension. For a Rips
// filtration every dim0 birth is 0 and, at the full filtration endpoint,
// exactly one dim0 bar is infinite. Zero-persistence dim1 pairs are dropped.
struct PersistenceDiagram {
    std::vector<Bar> dim0;
    std::vector<Bar> dim1;
};

namespace detail {

struct FiltEdge {
    double diameter;
    std::uint32_t u, v;
};

// Z/2 column addition: symmetric difference of two sorted index vectors.
inline void add_columns(std::vector<std::uint32_t>& target, const std::vector<std::uint32_t>& other,
                        std::vector<std::uint32_t>& buffer) {
    buffer.clear();
    std::size_t i = 0, j = 0;
    while (i < target.size() && j < other.size()) {
        if (target[i] < other[j]) buffer.push_back(target[i++]);
        else if (other[j] < target[i]) buffer.push_back(other[j++]);
        else { ++i; ++j; }
    }
    buffer.insert(buffer.end(), target.begin() + i, target.end());
    buffer.insert(buffer.end(), other.begin() + j, other.end());
    target.swap(buffer);
}

} // namespace detail

// Persistent homology of the Rips filtration in dimensions 0 and 1.
//
// dim0 comes from the merge events of a minimum-spanning-forest sweep over the
// edges in filtration order. dim1 comes from reducing the triangle boundary
// matrix over Z/2; columns are indexed by edge filtration rank. Rows of edges
// already known to be MSF pivots are compressed away up front, and no edge
// column is ever reduced — the union-find pass subsumes them.
//
// max_scale caps the filtration; classes still alive there get death = inf.
// The default is the full filtration, whose endpoint is connected, so exactly
// one dim0 bar is infinite and none of dim1 is.
inline PersistenceDiagram rips_persistence(const DistanceMatrix& dist, double max_scale = kInf) {
    dist.validate();
    const std::uint32_t n = static_cast<std::uint32_t>(dist.size());

    std::vector<detail::FiltEdge> edges;
    edges.reserve(std::size_t(n) * (n - 1) / 2);
    for (std::uint32_t u = 0; u < n; ++u)
        for (std::uint32_t v = u + 1; v < n; ++v)
            if (dist(u, v) <= max_scale) edges.push_back({dist(u, v), u, v});
    std::sort(edges.begin(), edges.end(), [](const detail::FiltEdge& a, const detail::FiltEdge& b) {
        if (a.diameter != b.diameter) return a.diameter < b.diameter;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });

    PersistenceDiagram out;

    // dim 0: each union-find merge kills one component at the edge diameter.
    UnionFind uf(n);
    std::vector<bool> edge_negative(edges.size(), false);
    std::uint32_t merges = 0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (uf.link(edges[e].u, edges[e].v)) {
            edge_negative[e] = true;
            out.dim0.push_back({0.0, edges[e].diameter});
            ++merges;
        }
    }
    for (std::uint32_t c = 0; c < n - merges; ++c) // surviving components
        out.dim0.push_back({0.0, kInf});
    std::sort(out.dim0.begin(), out.dim0.end(), bar_less);

    // Edge rank lookup for triangle boundary columns.
    std::vector<std::uint32_t> edge_rank(std::size_t(n) * n, 0);
    std::vector<bool> edge_present(std::size_t(n) * n, false);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        edge_rank[std::size_t(edges[e].u) * n + edges[e].v] = static_cast<std::uint32_t>(e);
        edge_present[std::size_t(edges[e].u) * n + edges[e].v] = true;
    }

    // dim 1: triangles in filtration order.
    struct Tri {
        double diameter;
        std::uint32_t a, b, c;
    };
    std::vector<Tri> tris;
    for (std::uint32_t u = 0; u < n; ++u)
        for (std::uint32_t v = u + 1; v < n; ++v) {
            if (!edge_present[std::size_t(u) * n + v]) continue;
            const double duv = dist(u, v);
            for (std::uint32_t w = v + 1; w < n; ++w) {
                if (!edge_present[std::size_t(u) * n + w] ||
                    !edge_present[std::size_t(v) * n + w])
                    continue;
                const double d = std::max({duv, dist(u, w), dist(v, w)});
                if (d <= max_scale) tris.push_back({d, u, v, w});
            }
        }
    std::sort(tris.begin(), tris.end(), [](const Tri& a, const Tri& b) {
        if (a.diameter != b.diameter) return a.diameter < b.diameter;
        if (a.a != b.a) return a.a < b.a;
        if (a.b != b.b) return a.b < b.b;
        return a.c < b.c;
    });

    // pivot_col[e] = index into stored reduced columns whose low is edge e.
    std::vector<std::int64_t> pivot_col(edges.size(), -1);
    std::vector<std::vector<std::uint32_t>> stored;
    std::vector<double> stored_death;
    std::vector<std::uint32_t> work, buffer;

    std::vector<bool> edge_paired(edges.size(), false);
    for (const Tri& t : tris) {
        work.clear();
        // Compression: rows of negative (MSF) edges can never be pivots, drop them.
        for (auto [x, y] : {std::pair{t.a, t.b}, std::pair{t.a, t.c}, std::pair{t.b, t.c}}) {
            const std::uint32_t e = edge_rank[std::size_t(x) * n + y];
            if (!edge_negative[e]) work.push_back(e);
        }
        std::sort(work.begin(), work.end());

        while (!work.empty()) {
            const std::uint32_t low = work.back();
            const std::int64_t owner = pivot_col[low];
            if (owner < 0) {
                pivot_col[low] = static_cast<std::int64_t>(stored.size());
                edge_paired[low] = true;
                if (t.diameter > edges[low].diameter)
                    out.dim1.push_back({edges[low].diameter, t.diameter});
                stored.push_back(work);
                stored_death.push_back(t.diameter);
                break;
            }
            detail::add_columns(work, stored[static_cast<std::size_t>(owner)], buffer);
        }
    }

    // Positive edges never claimed by a triangle carry 1-cycles past max_scale.
    for (std::size_t e = 0; e < edges.size(); ++e)
        if (!edge_negative[e] && !edge_paired[e]) out.dim1.push_back({edges[e].diameter, kInf});

    std::sort(out.dim1.begin(), out.dim1.end(), bar_less);
    return out;
}

struct BettiCounts {
    std::size_t beta0 = 0;
    std::size_t beta1 = 0;
};

inline BettiCounts betti_counts(const PersistenceDiagram& pd, double scale) {
    BettiCounts b;
    for (const Bar& bar : pd.dim0)
        if (bar.birth <= scale && scale < bar.death) ++b.beta0;
    for (const Bar& bar : pd.dim1)
        if (bar.birth <= scale && scale < bar.death) ++b.beta1;
    return b;
}

// Number of components / loops alive at the given scale (birth <= s < death).
inline BettiCounts betti_at_scale(const DistanceMatrix& dist, double scale) {
    if (!(scale >= 0.0)) throw validation_error("scale must be >= 0");
    return betti_counts(rips_persistence(dist), scale);
}

// Interchange format: one point per line, "dim birth death", death may be "inf".
inline void write_diagram(std::ostream& out, const PersistenceDiagram& pd) {
    auto emit = [&](int dim, const std::vector<Bar>& bars) {
        std::vector<Bar> finite, infinite;
        for (const Bar& b : bars) (b.is_infinite() ? infinite : finite).push_back(b);
        for (const Bar& b : finite)
            out << dim << ' ' << format_value(b.birth) << ' ' << format_value(b.death) << '\n';
        for (const Bar& b : infinite) out << dim << ' ' << format_value(b.birth) << " inf\n";
    };
    emit(0, pd.dim0);
    emit(1, pd.dim1);
}

inline PersistenceDiagram read_diagram(std::istream& in) {
    PersistenceDiagram pd;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string dim_tok, birth_tok, death_tok, extra;
        if (!(ls >> dim_tok >> birth_tok >> death_tok))
            throw parse_error("expected \"dim birth death\"", lineno);
        if (ls >> extra) throw parse_error("unexpected token \"" + extra + "\"", lineno);
        const long long dim = parse_integer(dim_tok, lineno);
        if (dim != 0 && dim != 1) throw parse_error("dimension must be 0 or 1", lineno);
        Bar bar{parse_value(birth_tok, lineno), parse_value(death_tok, lineno)};
        if (bar.birth > bar.death) throw parse_error("birth exceeds death", lineno);
        (dim == 0 ? pd.dim0 : pd.dim1).push_back(bar);
    }
    return pd;
}

} // namespace topotext
