#pragma once

#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

#include "topotext/distance_matrix.hpp"
#include "topotext/errors.hpp"
#include "topotext/persistence.hpp"
#include "topotext/wasserstein.hpp"

namespace topotext {

// A document in embedding space: one row per in-vocabulary token (in document
// order), one column per embedding dimension. Viewed as D parallel time series
// of length T.
struct EmbeddingMatrix {
    std::size_t rows = 0; // T, tokens
    std::size_t cols = 0; // D, embedding dimensions
    std::vector<double> values; // row-major

    double at(std::size_t t, std::size_t d) const { return values[t * cols + d]; }
    double& at(std::size_t t, std::size_t d) { return values[t * cols + d]; }

    EmbeddingMatrix without_column(std::size_t drop) const {
        EmbeddingMatrix out;
        out.rows = rows;
        out.cols = cols - 1;
        out.values.reserve(rows * out.cols);
        for (std::size_t t = 0; t < rows; ++t)
            for (std::size_t d = 0; d < cols; ++d)
                if (d != drop) out.values.push_back(at(t, d));
        return out;
    }
};

enum class SmoothingMode {
    truncate,    // drop out-of-range taps, keep in-range weights as written
    renormalize, // scale in-range taps back up to the full kernel mass
};

// Per-column smoothing with the fixed 7-tap kernel
// (1/8, 1/4, 1/2, 1, 1/2, 1/4, 1/8) centered on each position. The kernel is
// applied unnormalized (mass 11/4); near the boundaries, taps that would fall
// outside the column are dropped.
inline EmbeddingMatrix smooth_columns(const EmbeddingMatrix& psi,
                                      SmoothingMode mode = SmoothingMode::truncate) {
    if (psi.rows < 1) throw validation_error("embedding matrix must have at least one row");
    static constexpr double kTaps[7] = {0.125, 0.25, 0.5, 1.0, 0.5, 0.25, 0.125};
    static constexpr double kMass = 2.75;

    const std::size_t T = psi.rows, D = psi.cols;
    EmbeddingMatrix out;
    out.rows = T;
    out.cols = D;
    out.values.assign(T * D, 0.0);

    for (std::size_t t = 0; t < T; ++t) {
        double used_mass = 0.0;
        for (int k = -3; k <= 3; ++k) {
            const long long s = static_cast<long long>(t) + k;
            if (s < 0 || s >= static_cast<long long>(T)) continue;
            used_mass += kTaps[k + 3];
        }
        const double scale = (mode == SmoothingMode::renormalize) ? kMass / used_mass : 1.0;
        for (std::size_t d = 0; d < D; ++d) {
            double acc = 0.0;
            for (int k = -3; k <= 3; ++k) {
                const long long s = static_cast<long long>(t) + k;
                if (s < 0 || s >= static_cast<long long>(T)) continue;
                acc += kTaps[k + 3] * psi.at(static_cast<std::size_t>(s), d);
            }
            out.at(t, d) = acc * scale;
        }
    }
    return out;
}

// Distance between smoothed columns i and j:
//   theta(i, j) = (1/T) * |col_i| * |col_j| * (1 - cos(col_i, col_j))
//               = (1/T) * (|col_i| * |col_j| - <col_i, col_j>)
// which is symmetric, nonnegative (Cauchy-Schwarz), and zero on the diagonal.
// A zero column has zero magnitude and annihilates the product, so pairs
// involving it get distance 0.
inline DistanceMatrix column_distance_matrix(const EmbeddingMatrix& smoothed) {
    if (smoothed.rows < 1) throw validation_error("embedding matrix must have at least one row");
    const std::size_t T = smoothed.rows, D = smoothed.cols;

    std::vector<double> norms(D, 0.0);
    for (std::size_t d = 0; d < D; ++d) {
        double s = 0.0;
        for (std::size_t t = 0; t < T; ++t) s += smoothed.at(t, d) * smoothed.at(t, d);
        norms[d] = std::sqrt(s);
    }

    DistanceMatrix theta(D);
    for (std::size_t i = 0; i < D; ++i) {
        for (std::size_t j = i + 1; j < D; ++j) {
            bool identical = true;
            double dot = 0.0;
            for (std::size_t t = 0; t < T; ++t) {
                identical = identical && smoothed.at(t, i) == smoothed.at(t, j);
                dot += smoothed.at(t, i) * smoothed.at(t, j);
            }
            if (identical) { // exact, no rounding residue
                theta.set(i, j, 0.0);
                continue;
            }
            const double v = (norms[i] * norms[j] - dot) / static_cast<double>(T);
            theta.set(i, j, v > 0.0 ? v : 0.0);
        }
    }
    return theta;
}

// Leave-one-out topological sensitivity of a document: omega0[d] and omega1[d]
// are the Wasserstein distances between the diagrams of the full column graph
// and the graph with dimension d removed, for components and loops.
struct EmbeddingTopoFeatures {
    std::vector<double> omega0;
    std::vector<double> omega1;
};

struct EmbeddingTopoConfig {
    double wasserstein_p = 1.0;
    SmoothingMode smoothing = SmoothingMode::truncate;
    unsigned threads = 1;
};

inline EmbeddingTopoFeatures embedding_topo_features(const EmbeddingMatrix& psi,
                                                     const EmbeddingTopoConfig& cfg = {}) {
    if (psi.cols < 3)
        throw validation_error("embedding feature extraction needs at least 3 dimensions");

    const EmbeddingMatrix smoothed = smooth_columns(psi, cfg.smoothing);
    const DistanceMatrix theta = column_distance_matrix(smoothed);
    const std::size_t D = theta.size();

    const PersistenceDiagram full = rips_persistence(theta);
    const double full_cap = theta.max_entry();

    EmbeddingTopoFeatures out;
    out.omega0.assign(D, 0.0);
    out.omega1.assign(D, 0.0);

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t d = begin; d < end; ++d) {
            const DistanceMatrix sub = theta.without_point(d);
            const PersistenceDiagram reduced = rips_persistence(sub);
            // One infinite component bar on each side; cap both with the
            // larger of the two matrix maxima so their costs stay comparable.
            const double cap = std::max(full_cap, sub.max_entry());
            const PersistenceDiagram full_capped = normalize_infinite(full, cap);
            const PersistenceDiagram reduced_capped = normalize_infinite(reduced, cap);
            out.omega0[d] =
                wasserstein_distance(full_capped.dim0, reduced_capped.dim0, cfg.wasserstein_p);
            out.omega1[d] =
                wasserstein_distance(full_capped.dim1, reduced_capped.dim1, cfg.wasserstein_p);
        }
    };

    const unsigned threads = cfg.threads > 1 ? std::min<unsigned>(cfg.threads, D) : 1;
    if (threads <= 1) {
        run_range(0, D);
    } else {
        // Static partition; each worker writes disjoint slots, so the result
        // is independent of scheduling.
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        const std::size_t chunk = (D + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t begin = std::size_t(w) * chunk;
            const std::size_t end = std::min(D, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&run_range, &errors, w, begin, end] {
                try {
                    run_range(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& err : errors)
            if (err) std::rethrow_exception(err);
    }
    return out;
}

} // namespace topotext
