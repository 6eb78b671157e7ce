#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "topotext/classify.hpp"
#include "topotext/corpus.hpp"
#include "topotext/csv.hpp"
#include "topotext/errors.hpp"
#include "topotext/numeric.hpp"

namespace topotext {

inline void write_feature_csv(std::ostream& out, const FeatureMatrix& m) {
    std::vector<std::string> row{"id"};
    row.insert(row.end(), m.columns.begin(), m.columns.end());
    write_csv_row(out, row);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        row.assign(1, m.row_ids[r]);
        for (double v : m.row(r)) row.push_back(format_value(v));
        write_csv_row(out, row);
    }
}

inline FeatureMatrix read_feature_csv(std::istream& in) {
    const auto records = read_csv(in);
    if (records.empty()) throw parse_error("feature file is empty", 1);
    const auto& header = records.front().fields;
    if (header.empty() || header[0] != "id")
        throw parse_error("feature file must start with an \"id\" column", records.front().line);

    FeatureMatrix m;
    m.columns.assign(header.begin() + 1, header.end());
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != header.size())
            throw parse_error("record has " + std::to_string(rec.fields.size()) +
                                  " fields, expected " + std::to_string(header.size()),
                              rec.line);
        m.row_ids.push_back(rec.fields[0]);
        for (std::size_t c = 1; c < rec.fields.size(); ++c)
            m.values.push_back(parse_value(rec.fields[c], rec.line));
    }
    return m;
}

// Probability files carry one proba_<class> column per class.
inline void write_proba_csv(std::ostream& out, const FeatureMatrix& proba) {
    FeatureMatrix named = proba;
    for (auto& c : named.columns) c = "proba_" + c;
    write_feature_csv(out, named);
}

inline FeatureMatrix read_proba_csv(std::istream& in) {
    FeatureMatrix m = read_feature_csv(in);
    for (auto& c : m.columns) {
        if (c.rfind("proba_", 0) != 0)
            throw parse_error("probability column \"" + c + "\" must be named proba_<class>");
        c = c.substr(6);
    }
    for (double v : m.values)
        if (!(v >= 0.0 && v <= 1.0))
            throw validation_error("probability value outside [0, 1]");
    return m;
}

inline LabelMatrix labels_from_corpus(const LabeledCorpus& corpus) {
    LabelMatrix labels;
    labels.classes = corpus.classes();
    for (const Document& d : corpus.docs) {
        labels.row_ids.push_back(d.id);
        for (const auto& cls : labels.classes) {
            const bool has =
                std::find(d.labels.begin(), d.labels.end(), cls) != d.labels.end();
            labels.values.push_back(has ? 1 : 0);
        }
    }
    return labels;
}

} // namespace topotext
