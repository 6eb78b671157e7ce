#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "topotext/embedding_features.hpp"
#include "topotext/errors.hpp"
#include "topotext/numeric.hpp"

namespace topotext {

// Immutable token -> vector table; shareable across concurrent extractions.
class EmbeddingTable {
public:
    EmbeddingTable(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return index_.size(); }

    // Returns false (keeping the existing vector) if token is already present.
    bool insert(const std::string& token, std::vector<double> vec) {
        auto [it, inserted] = index_.try_emplace(token, storage_.size() / dim_);
        if (!inserted) return false;
        storage_.insert(storage_.end(), vec.begin(), vec.end());
        return true;
    }

    std::span<const double> lookup(std::string_view token) const {
        auto it = index_.find(std::string(token));
        if (it == index_.end()) return {};
        return {storage_.data() + it->second * dim_, dim_};
    }

    bool contains(std::string_view token) const {
        return index_.find(std::string(token)) != index_.end();
    }

private:
    std::size_t dim_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> storage_;
};

// word2vec text format: header "V D", then V lines of token followed by D
// decimals. Duplicate tokens keep the first vector and emit a warning.
// All failures name the offending 1-based line.
inline EmbeddingTable load_embeddings(std::istream& in,
                                      std::vector<std::string>* warnings = nullptr) {
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw parse_error("missing word2vec header", 1);
    ++lineno;
    {
        std::istringstream hs(line);
        std::string vtok, dtok, extra;
        if (!(hs >> vtok >> dtok) || (hs >> extra))
            throw parse_error("header must be \"<vocab-size> <dimension>\"", lineno);
        const long long v = parse_integer(vtok, lineno);
        const long long d = parse_integer(dtok, lineno);
        if (v < 1 || d < 1) throw parse_error("vocabulary size and dimension must be >= 1", lineno);

        EmbeddingTable table(static_cast<std::size_t>(d));
        const std::size_t expected = static_cast<std::size_t>(v);
        const std::size_t dim = static_cast<std::size_t>(d);

        std::size_t rows = 0;
        std::vector<double> vec(dim);
        while (rows < expected) {
            if (!std::getline(in, line))
                throw parse_error("expected " + std::to_string(expected) + " vector rows, got " +
                                      std::to_string(rows),
                                  lineno);
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                throw parse_error("blank line inside vector block", lineno);
            std::istringstream rs(line);
            std::string token, field;
            rs >> token;
            std::size_t got = 0;
            while (rs >> field) {
                if (got >= dim)
                    throw parse_error("row for \"" + token + "\" has more than " +
                                          std::to_string(dim) + " values",
                                      lineno);
                vec[got++] = parse_value(field, lineno);
            }
            if (got != dim)
                throw parse_error("row for \"" + token + "\" has " + std::to_string(got) +
                                      " values, expected " + std::to_string(dim),
                                  lineno);
            if (!table.insert(token, vec) && warnings)
                warnings->push_back("line " + std::to_string(lineno) + ": duplicate token \"" +
                                    token + "\", keeping first vector");
            ++rows;
        }
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw parse_error("unexpected content after declared vector rows", lineno);
        }
        return table;
    }
}

inline EmbeddingTable load_embeddings(const std::string& path,
                                      std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open embedding file: " + path);
    return load_embeddings(in, warnings);
}

// Rows are the vectors of in-vocabulary tokens, in document order;
// out-of-vocabulary tokens are skipped. A fully unknown document is an error.
inline EmbeddingMatrix embed_document(std::span<const std::string> tokens,
                                      const EmbeddingTable& table) {
    EmbeddingMatrix m;
    m.cols = table.dim();
    for (const std::string& tok : tokens) {
        const auto vec = table.lookup(tok);
        if (vec.empty()) continue;
        m.values.insert(m.values.end(), vec.begin(), vec.end());
        ++m.rows;
    }
    if (m.rows == 0)
        throw validation_error("document has no in-vocabulary tokens");
    return m;
}

} // namespace topotext
