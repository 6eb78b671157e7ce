#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "topotext/distance_matrix.hpp"
#include "topotext/errors.hpp"
#include "topotext/numeric.hpp"
#include "topotext/persistence.hpp"

namespace topotext {

// Ordered for deterministic iteration, so dot products and norms sum in a
// fixed term order on every platform.
using TfidfVector = std::map<std::string, double>;

// Balanced contiguous split into block_count blocks; with T = q*B + r tokens
// the first r blocks get q + 1. Block sizes differ by at most one and
// concatenating the blocks in order reproduces the input.
inline std::vector<std::span<const std::string>> split_blocks(
    std::span<const std::string> tokens, std::size_t block_count) {
    if (block_count < 1) throw validation_error("block count must be >= 1");
    if (tokens.size() < block_count)
        throw validation_error("document has " + std::to_string(tokens.size()) +
                               " tokens, needs at least " + std::to_string(block_count));
    const std::size_t q = tokens.size() / block_count;
    const std::size_t r = tokens.size() % block_count;
    std::vector<std::span<const std::string>> blocks;
    blocks.reserve(block_count);
    std::size_t offset = 0;
    for (std::size_t b = 0; b < block_count; ++b) {
        const std::size_t len = q + (b < r ? 1 : 0);
        blocks.push_back(tokens.subspan(offset, len));
        offset += len;
    }
    return blocks;
}

// One TF-IDF vector per block. tf is the raw term count inside the block;
// idf = ln((1 + B) / (1 + df)) + 1 with df the number of blocks containing
// the term. The vocabulary is the union over this document's blocks.
inline std::vector<TfidfVector> block_tfidf(std::span<const std::span<const std::string>> blocks) {
    const std::size_t B = blocks.size();
    std::vector<std::map<std::string, std::size_t>> counts(B);
    for (std::size_t b = 0; b < B; ++b)
        for (const std::string& tok : blocks[b]) ++counts[b][tok];

    std::map<std::string, std::size_t> df;
    for (const auto& block_counts : counts)
        for (const auto& [term, _] : block_counts) ++df[term];

    std::vector<TfidfVector> out(B);
    for (std::size_t b = 0; b < B; ++b)
        for (const auto& [term, tf] : counts[b]) {
            const double idf =
                std::log((1.0 + double(B)) / (1.0 + double(df[term]))) + 1.0;
            out[b][term] = double(tf) * idf;
        }
    return out;
}

namespace detail {

inline double tfidf_dot(const TfidfVector& a, const TfidfVector& b) {
    double dot = 0.0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first) ++ia;
        else if (ib->first < ia->first) ++ib;
        else {
            dot += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    return dot;
}

inline double tfidf_norm(const TfidfVector& a) {
    double s = 0.0;
    for (const auto& [_, w] : a) s += w * w;
    return std::sqrt(s);
}

} // namespace detail

// Cosine-distance graph over the blocks. Zero vectors: distance 0 to other
// zero vectors, 1 to anything with content.
inline DistanceMatrix block_distance_matrix(std::span<const TfidfVector> vectors) {
    const std::size_t B = vectors.size();
    std::vector<double> norms(B);
    for (std::size_t i = 0; i < B; ++i) norms[i] = detail::tfidf_norm(vectors[i]);

    DistanceMatrix dist(B);
    for (std::size_t i = 0; i < B; ++i)
        for (std::size_t j = i + 1; j < B; ++j) {
            double d;
            if (vectors[i] == vectors[j]) d = 0.0; // exact, no rounding residue
            else if (norms[i] == 0.0 || norms[j] == 0.0) d = 1.0;
            else d = 1.0 - detail::tfidf_dot(vectors[i], vectors[j]) / (norms[i] * norms[j]);
            dist.set(i, j, std::clamp(d, 0.0, 1.0));
        }
    return dist;
}

// x: the B-1 finite component death diameters, ascending (9 for the default
// B = 10). y: loop count, mean birth, mean duration, sample std of births,
// sample std of durations; all zero when there are no loops.
struct TfidfTopoFeatures {
    std::vector<double> x;
    std::array<double, 5> y{0, 0, 0, 0, 0};

    std::vector<double> flatten() const {
        std::vector<double> out(x);
        out.insert(out.end(), y.begin(), y.end());
        return out;
    }
};

inline TfidfTopoFeatures tfidf_topo_features(std::span<const std::string> tokens,
                                             std::size_t block_count = 10) {
    const auto blocks = split_blocks(tokens, block_count);
    const auto vectors = block_tfidf(blocks);
    const DistanceMatrix dist = block_distance_matrix(vectors);
    const PersistenceDiagram pd = rips_persistence(dist);

    TfidfTopoFeatures out;
    for (const Bar& bar : pd.dim0)
        if (!bar.is_infinite()) out.x.push_back(bar.death);
    std::sort(out.x.begin(), out.x.end());

    if (!pd.dim1.empty()) {
        std::vector<double> births, durations;
        for (const Bar& bar : pd.dim1) {
            births.push_back(bar.birth);
            durations.push_back(bar.persistence());
        }
        out.y[0] = double(pd.dim1.size());
        out.y[1] = mean(births);
        out.y[2] = mean(durations);
        out.y[3] = sample_stddev(births);
        out.y[4] = sample_stddev(durations);
    }
    return out;
}

} // namespace topotext
