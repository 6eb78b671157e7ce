#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "topotext/errors.hpp"
#include "topotext/numeric.hpp"

namespace topotext {

// Symmetric nonnegative matrix with zero diagonal: the metric input to
// every persistence computation here. Stored dense row-major.
class DistanceMatrix {
public:
    DistanceMatrix() = default;

    explicit DistanceMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {}

    // Takes row-major entries as parsed; call validate() before trusting them.
    DistanceMatrix(std::size_t n, std::vector<double> entries)
        : n_(n), entries_(std::move(entries)) {
        if (entries_.size() != n_ * n_)
            throw validation_error("distance matrix storage has wrong size");
    }

    std::size_t size() const noexcept { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

    // Writes both (i,j) and (j,i); the diagonal is fixed at zero.
    void set(std::size_t i, std::size_t j, double v) {
        entries_[i * n_ + j] = v;
        entries_[j * n_ + i] = v;
    }

    double max_entry() const {
        double m = 0.0;
        for (double v : entries_)
            if (v > m) m = v;
        return m;
    }

    // Submatrix with vertex k removed (leave-one-out).
    DistanceMatrix without_point(std::size_t k) const {
        DistanceMatrix out(n_ - 1);
        for (std::size_t i = 0, r = 0; i < n_; ++i) {
            if (i == k) continue;
            for (std::size_t j = 0, c = 0; j < n_; ++j) {
                if (j == k) continue;
                out.entries_[r * out.n_ + c] = (*this)(i, j);
                ++c;
            }
            ++r;
        }
        return out;
    }

    void validate() const {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                const double v = (*this)(i, j);
                if (!std::isfinite(v))
                    throw validation_error("non-finite distance at (" + std::to_string(i) +
                                           ", " + std::to_string(j) + ")");
                if (v < 0.0)
                    throw validation_error("negative distance at (" + std::to_string(i) + ", " +
                                           std::to_string(j) + ")");
                if (j > i && v != (*this)(j, i))
                    throw validation_error("asymmetric entries at (" + std::to_string(i) + ", " +
                                           std::to_string(j) + ")");
            }
            if ((*this)(i, i) != 0.0)
                throw validation_error("nonzero diagonal at (" + std::to_string(i) + ", " +
                                       std::to_string(i) + ")");
        }
    }

private:
    std::size_t n_ = 0;
    std::vector<double> entries_;
};

// Plain-text format: first line the vertex count n, then n lines of n values.
// Blank lines are skipped. Errors carry 1-based line numbers.
inline DistanceMatrix read_distance_matrix(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;

    auto next_nonblank = [&](std::string& out) -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                out = line;
                return true;
            }
        }
        return false;
    };

    std::string header;
    if (!next_nonblank(header)) throw parse_error("empty distance matrix file", lineno ? lineno : 1);

    std::istringstream hs(header);
    std::string tok;
    if (!(hs >> tok)) throw parse_error("missing vertex count", lineno);
    const long long n_signed = parse_integer(tok, lineno);
    if (n_signed < 1) throw parse_error("vertex count must be >= 1", lineno);
    if (hs >> tok) throw parse_error("unexpected token after vertex count", lineno);
    const std::size_t n = static_cast<std::size_t>(n_signed);

    std::vector<double> entries;
    entries.reserve(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        std::string row;
        if (!next_nonblank(row))
            throw parse_error("expected " + std::to_string(n) + " matrix rows, got " +
                                  std::to_string(r),
                              lineno ? lineno : 1);
        std::istringstream rs(row);
        std::size_t c = 0;
        while (rs >> tok) {
            if (c >= n)
                throw parse_error("row " + std::to_string(r) + " has more than " +
                                      std::to_string(n) + " values",
                                  lineno);
            entries.push_back(parse_value(tok, lineno));
            ++c;
        }
        if (c != n)
            throw parse_error("row " + std::to_string(r) + " has " + std::to_string(c) +
                                  " values, expected " + std::to_string(n),
                              lineno);
    }
    std::string extra;
    if (next_nonblank(extra)) throw parse_error("unexpected content after matrix rows", lineno);

    return DistanceMatrix(n, std::move(entries));
}

inline void write_distance_matrix(std::ostream& out, const DistanceMatrix& m) {
    out << m.size() << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (j) out << ' ';
            out << format_value(m(i, j));
        }
        out << '\n';
    }
}

} // namespace topotext
