#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "topotext/csv.hpp"
#include "topotext/errors.hpp"
#include "topotext/tokenize.hpp"

namespace topotext {

inline constexpr std::array<std::string_view, 4> kGenreUniverse = {"drama", "comedy", "action",
                                                                   "romance"};

struct Document {
    std::string id;
    std::string text;
    std::vector<std::string> labels;
    bool in_train = false;
};

struct LabeledCorpus {
    std::vector<Document> docs;

    // Label classes present, in canonical genre order.
    std::vector<std::string> classes() const {
        std::vector<std::string> out;
        for (std::string_view genre : kGenreUniverse) {
            for (const Document& d : docs) {
                if (std::find(d.labels.begin(), d.labels.end(), genre) != d.labels.end()) {
                    out.emplace_back(genre);
                    break;
                }
            }
        }
        return out;
    }

    std::size_t train_count() const {
        std::size_t c = 0;
        for (const Document& d : docs) c += d.in_train;
        return c;
    }
};

namespace detail {

// Fisher-Yates with an explicit modulo draw: std::shuffle's output is
// implementation-defined, and the split must be reproducible everywhere.
inline void seeded_shuffle(std::vector<std::size_t>& items, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(items[i - 1], items[j]);
    }
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace detail

// Deterministic 2/3 train, 1/3 test assignment from a seeded shuffle.
inline void assign_split(LabeledCorpus& corpus, std::uint64_t seed) {
    const std::size_t n = corpus.docs.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    detail::seeded_shuffle(order, seed);
    const std::size_t train = static_cast<std::size_t>(std::llround(2.0 * double(n) / 3.0));
    for (std::size_t i = 0; i < n; ++i) corpus.docs[order[i]].in_train = i < train;
}

struct CorpusLoadConfig {
    std::size_t min_tokens = 200;
    std::uint64_t seed = 42;
    char label_delimiter = '|';
};

// CSV with header columns id, text, labels (extra columns ignored). labels is
// a delimiter-separated multilabel field over the four genres; labels outside
// the universe are dropped with a warning, and a document left with no usable
// label is skipped. Documents with fewer than min_tokens tokens are dropped.
inline LabeledCorpus load_corpus(std::istream& in, const CorpusLoadConfig& cfg = {},
                                 std::vector<std::string>* warnings = nullptr) {
    const auto records = read_csv(in);
    if (records.empty()) throw parse_error("corpus file is empty", 1);

    const auto& header = records.front().fields;
    auto column = [&](std::string_view name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw parse_error("missing required column \"" + std::string(name) + "\"",
                          records.front().line);
    };
    const std::size_t id_col = column("id");
    const std::size_t text_col = column("text");
    const std::size_t labels_col = column("labels");

    LabeledCorpus corpus;
    std::set<std::string> seen_ids;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        const std::size_t needed = std::max({id_col, text_col, labels_col}) + 1;
        if (rec.fields.size() < needed)
            throw parse_error("record has " + std::to_string(rec.fields.size()) +
                                  " fields, expected at least " + std::to_string(needed),
                              rec.line);

        Document doc;
        doc.id = detail::trim(rec.fields[id_col]);
        doc.text = rec.fields[text_col];
        if (doc.id.empty()) throw parse_error("empty id field", rec.line);
        if (!seen_ids.insert(doc.id).second)
            throw parse_error("duplicate id \"" + doc.id + "\"", rec.line);

        const std::string raw_labels = detail::trim(rec.fields[labels_col]);
        if (raw_labels.empty()) throw parse_error("empty labels field", rec.line);

        std::string_view rest = raw_labels;
        while (!rest.empty()) {
            const auto pos = rest.find(cfg.label_delimiter);
            std::string label = detail::trim(rest.substr(0, pos));
            rest = (pos == std::string_view::npos) ? std::string_view{} : rest.substr(pos + 1);
            if (label.empty()) continue;
            for (char& c : label) c = detail::lower_ascii(static_cast<unsigned char>(c));
            if (std::find(kGenreUniverse.begin(), kGenreUniverse.end(), label) ==
                kGenreUniverse.end()) {
                if (warnings)
                    warnings->push_back("line " + std::to_string(rec.line) +
                                        ": ignoring unknown label \"" + label + "\"");
                continue;
            }
            if (std::find(doc.labels.begin(), doc.labels.end(), label) == doc.labels.end())
                doc.labels.push_back(label);
        }
        if (doc.labels.empty()) {
            if (warnings)
                warnings->push_back("line " + std::to_string(rec.line) + ": document \"" +
                                    doc.id + "\" has no usable label, skipping");
            continue;
        }

        if (tokenize(doc.text).size() < cfg.min_tokens) continue;
        corpus.docs.push_back(std::move(doc));
    }

    assign_split(corpus, cfg.seed);
    return corpus;
}

inline LabeledCorpus load_corpus(const std::string& path, const CorpusLoadConfig& cfg = {},
                                 std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open corpus file: " + path);
    return load_corpus(in, cfg, warnings);
}

} // namespace topotext
