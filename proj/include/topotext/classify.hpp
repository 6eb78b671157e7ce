#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "topotext/errors.hpp"
#include "topotext/logistic.hpp"
#include "topotext/numeric.hpp"

namespace topotext {

// Rows are documents, columns named features. Column provenance is carried in
// the names ("tp1_*", "tp2_*", anything else is external).
struct FeatureMatrix {
    std::vector<std::string> row_ids;
    std::vector<std::string> columns;
    std::vector<double> values; // row-major

    std::size_t rows() const { return row_ids.size(); }
    std::size_t cols() const { return columns.size(); }

    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }

    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * cols(), cols()};
    }

    FeatureMatrix select_rows(std::span<const std::size_t> keep) const {
        FeatureMatrix out;
        out.columns = columns;
        for (std::size_t r : keep) {
            out.row_ids.push_back(row_ids[r]);
            const auto src = row(r);
            out.values.insert(out.values.end(), src.begin(), src.end());
        }
        return out;
    }
};

struct LabelMatrix {
    std::vector<std::string> row_ids;
    std::vector<std::string> classes;
    std::vector<std::uint8_t> values; // row-major, rows x classes

    std::size_t rows() const { return row_ids.size(); }
    std::uint8_t at(std::size_t r, std::size_t c) const { return values[r * classes.size() + c]; }

    LabelMatrix select_rows(std::span<const std::size_t> keep) const {
        LabelMatrix out;
        out.classes = classes;
        for (std::size_t r : keep) {
            out.row_ids.push_back(row_ids[r]);
            for (std::size_t c = 0; c < classes.size(); ++c) out.values.push_back(at(r, c));
        }
        return out;
    }
};

struct TrainConfig {
    double ridge_lambda = 1e-3;
    std::size_t max_iter = 100;
    std::uint64_t seed = 42;           // recorded for provenance; training is deterministic
    std::size_t min_rows_per_class = 10;
};

// One-vs-rest logistic models over standardized features.
struct LinearModel {
    std::vector<std::string> classes;
    std::vector<std::string> feature_names;
    std::vector<double> mean;                 // per feature, from training rows
    std::vector<double> scale;                // per feature; 1 for constant columns
    std::vector<std::vector<double>> weights; // per class, intercept first
};

namespace detail {

inline void check_aligned(const FeatureMatrix& f, const LabelMatrix& l) {
    if (f.rows() != l.rows()) throw validation_error("feature/label row counts differ");
    for (std::size_t r = 0; r < f.rows(); ++r)
        if (f.row_ids[r] != l.row_ids[r])
            throw validation_error("feature/label row id mismatch at row " + std::to_string(r) +
                                   " (\"" + f.row_ids[r] + "\" vs \"" + l.row_ids[r] + "\")");
}

inline std::vector<double> standardize(const FeatureMatrix& f, std::vector<double>& mean,
                                       std::vector<double>& scale) {
    const std::size_t n = f.rows(), k = f.cols();
    mean.assign(k, 0.0);
    scale.assign(k, 1.0);
    for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += f.at(i, j);
        mean[j] = n ? s / double(n) : 0.0;
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = f.at(i, j) - mean[j];
            var += d * d;
        }
        const double sd = n ? std::sqrt(var / double(n)) : 0.0;
        scale[j] = sd > 0.0 ? sd : 1.0;
    }
    std::vector<double> x(n * k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) x[i * k + j] = (f.at(i, j) - mean[j]) / scale[j];
    return x;
}

} // namespace detail

inline LinearModel train_linear(const FeatureMatrix& features, const LabelMatrix& labels,
                                const TrainConfig& cfg = {}) {
    detail::check_aligned(features, labels);
    const std::size_t n = features.rows(), k = features.cols();
    if (n == 0) throw validation_error("no training rows");

    for (std::size_t c = 0; c < labels.classes.size(); ++c) {
        std::size_t pos = 0;
        for (std::size_t r = 0; r < n; ++r) pos += labels.at(r, c);
        if (pos == 0 || pos == n)
            throw validation_error("class \"" + labels.classes[c] +
                                   "\" is degenerate in the training split (all " +
                                   (pos ? "positive" : "negative") + ")");
        if (pos < cfg.min_rows_per_class)
            throw validation_error("class \"" + labels.classes[c] + "\" has " +
                                   std::to_string(pos) + " training rows, needs at least " +
                                   std::to_string(cfg.min_rows_per_class));
    }

    LinearModel model;
    model.classes = labels.classes;
    model.feature_names = features.columns;
    const std::vector<double> x = detail::standardize(features, model.mean, model.scale);

    LogisticConfig lcfg;
    lcfg.ridge_lambda = cfg.ridge_lambda;
    lcfg.max_iter = cfg.max_iter;
    std::vector<std::uint8_t> y(n);
    for (std::size_t c = 0; c < labels.classes.size(); ++c) {
        for (std::size_t r = 0; r < n; ++r) y[r] = labels.at(r, c);
        model.weights.push_back(fit_logistic(x, n, k, y, lcfg));
    }
    return model;
}

// Per-class probabilities; columns are the model's classes.
inline FeatureMatrix predict_proba(const LinearModel& model, const FeatureMatrix& features) {
    if (features.cols() != model.feature_names.size())
        throw validation_error("feature count does not match the model");
    FeatureMatrix out;
    out.row_ids = features.row_ids;
    out.columns = model.classes;
    out.values.reserve(features.rows() * model.classes.size());
    std::vector<double> std_row(features.cols());
    for (std::size_t r = 0; r < features.rows(); ++r) {
        for (std::size_t j = 0; j < features.cols(); ++j)
            std_row[j] = (features.at(r, j) - model.mean[j]) / model.scale[j];
        for (const auto& w : model.weights)
            out.values.push_back(logistic_predict(w, std_row));
    }
    return out;
}

// Probability-level stacking: one logistic model per class over the
// concatenated class-probability columns of the two sources, trained on the
// training rows only. Column standardization makes constant inputs inert.
inline LinearModel ensemble_combine(const FeatureMatrix& proba_a, const FeatureMatrix& proba_b,
                                    const LabelMatrix& labels, const TrainConfig& cfg = {}) {
    detail::check_aligned(proba_a, labels);
    detail::check_aligned(proba_b, labels);
    if (proba_a.columns != labels.classes || proba_b.columns != labels.classes)
        throw validation_error("probability columns do not match the label classes");

    FeatureMatrix stacked;
    stacked.row_ids = proba_a.row_ids;
    for (const auto& c : proba_a.columns) stacked.columns.push_back("a_" + c);
    for (const auto& c : proba_b.columns) stacked.columns.push_back("b_" + c);
    for (std::size_t r = 0; r < proba_a.rows(); ++r) {
        const auto ra = proba_a.row(r);
        const auto rb = proba_b.row(r);
        stacked.values.insert(stacked.values.end(), ra.begin(), ra.end());
        stacked.values.insert(stacked.values.end(), rb.begin(), rb.end());
    }

    LinearModel model;
    model.classes = labels.classes;
    model.feature_names = stacked.columns;
    const std::vector<double> x = detail::standardize(stacked, model.mean, model.scale);

    LogisticConfig lcfg;
    lcfg.ridge_lambda = cfg.ridge_lambda;
    lcfg.max_iter = cfg.max_iter;
    const std::size_t n = stacked.rows(), k = stacked.cols();
    std::vector<std::uint8_t> y(n);
    for (std::size_t c = 0; c < labels.classes.size(); ++c) {
        for (std::size_t r = 0; r < n; ++r) y[r] = labels.at(r, c);
        model.weights.push_back(fit_logistic(x, n, k, y, lcfg));
    }
    return model;
}

// Applies an ensemble model to a pair of probability sources.
inline FeatureMatrix ensemble_predict(const LinearModel& model, const FeatureMatrix& proba_a,
                                      const FeatureMatrix& proba_b) {
    if (proba_a.rows() != proba_b.rows()) throw validation_error("probability row counts differ");
    FeatureMatrix stacked;
    stacked.row_ids = proba_a.row_ids;
    for (const auto& c : proba_a.columns) stacked.columns.push_back("a_" + c);
    for (const auto& c : proba_b.columns) stacked.columns.push_back("b_" + c);
    for (std::size_t r = 0; r < proba_a.rows(); ++r) {
        const auto ra = proba_a.row(r);
        const auto rb = proba_b.row(r);
        stacked.values.insert(stacked.values.end(), ra.begin(), ra.end());
        stacked.values.insert(stacked.values.end(), rb.begin(), rb.end());
    }
    return predict_proba(model, stacked);
}

struct EvalReport {
    std::vector<std::string> classes;
    std::vector<double> class_accuracy;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double macro_accuracy = 0.0;
};

// Per-class binary metrics at threshold 0.5, macro-averaged unweighted.
// Zero-denominator precision/recall/F1 report 0.
inline EvalReport evaluate(const FeatureMatrix& proba, const LabelMatrix& labels) {
    detail::check_aligned(proba, labels);
    if (proba.columns != labels.classes)
        throw validation_error("probability columns do not match the label classes");
    if (proba.rows() == 0) throw validation_error("evaluation set is empty");

    EvalReport report;
    report.classes = labels.classes;
    const std::size_t n = proba.rows();
    double psum = 0.0, rsum = 0.0, fsum = 0.0, asum = 0.0;
    for (std::size_t c = 0; c < labels.classes.size(); ++c) {
        std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t r = 0; r < n; ++r) {
            const bool pred = proba.at(r, c) >= 0.5;
            const bool truth = labels.at(r, c) != 0;
            if (pred && truth) ++tp;
            else if (pred) ++fp;
            else if (truth) ++fn;
            else ++tn;
        }
        const double precision = (tp + fp) ? double(tp) / double(tp + fp) : 0.0;
        const double recall = (tp + fn) ? double(tp) / double(tp + fn) : 0.0;
        const double f1 =
            (precision + recall > 0.0) ? 2.0 * precision * recall / (precision + recall) : 0.0;
        const double accuracy = double(tp + tn) / double(n);
        report.class_accuracy.push_back(accuracy);
        psum += precision;
        rsum += recall;
        fsum += f1;
        asum += accuracy;
    }
    const double k = double(labels.classes.size());
    report.macro_precision = psum / k;
    report.macro_recall = rsum / k;
    report.macro_f1 = fsum / k;
    report.macro_accuracy = asum / k;
    return report;
}

inline EvalReport evaluate_model(const LinearModel& model, const FeatureMatrix& features,
                                 const LabelMatrix& labels) {
    return evaluate(predict_proba(model, features), labels);
}

// Versioned plain-text model file.
inline void save_model(std::ostream& out, const LinearModel& m) {
    out << "topotext-model 1\n";
    out << "classes " << m.classes.size();
    for (const auto& c : m.classes) out << ' ' << c;
    out << '\n';
    out << "features " << m.feature_names.size();
    for (const auto& f : m.feature_names) out << ' ' << f;
    out << '\n';
    auto emit_row = [&](const std::string& tag, std::span<const double> xs) {
        out << tag;
        for (double v : xs) out << ' ' << format_value(v);
        out << '\n';
    };
    emit_row("mean", m.mean);
    emit_row("scale", m.scale);
    for (std::size_t c = 0; c < m.classes.size(); ++c)
        emit_row("weights " + m.classes[c], m.weights[c]);
}

inline LinearModel load_model(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() {
        if (!std::getline(in, line)) throw parse_error("unexpected end of model file", lineno);
        ++lineno;
        return std::istringstream(line);
    };

    auto header = next_line();
    std::string magic;
    int version = 0;
    if (!(header >> magic >> version) || magic != "topotext-model")
        throw parse_error("not a topotext model file", lineno);
    if (version != 1) throw parse_error("unsupported model version", lineno);

    LinearModel m;
    auto read_names = [&](const std::string& tag, std::vector<std::string>& out) {
        auto ls = next_line();
        std::string word;
        std::size_t count = 0;
        if (!(ls >> word >> count) || word != tag)
            throw parse_error("expected \"" + tag + "\" row", lineno);
        for (std::size_t i = 0; i < count; ++i) {
            if (!(ls >> word)) throw parse_error("truncated \"" + tag + "\" row", lineno);
            out.push_back(word);
        }
    };
    read_names("classes", m.classes);
    read_names("features", m.feature_names);

    auto read_row = [&](const std::string& tag, std::size_t count, std::string* name) {
        auto ls = next_line();
        std::string word;
        if (!(ls >> word) || word != tag) throw parse_error("expected \"" + tag + "\" row", lineno);
        if (name && !(ls >> *name)) throw parse_error("missing class name", lineno);
        std::vector<double> xs(count);
        std::string tok;
        for (std::size_t i = 0; i < count; ++i) {
            if (!(ls >> tok)) throw parse_error("truncated \"" + tag + "\" row", lineno);
            xs[i] = parse_value(tok, lineno);
        }
        return xs;
    };
    m.mean = read_row("mean", m.feature_names.size(), nullptr);
    m.scale = read_row("scale", m.feature_names.size(), nullptr);
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        std::string name;
        m.weights.push_back(read_row("weights", m.feature_names.size() + 1, &name));
        if (name != m.classes[c]) throw parse_error("weights out of class order", lineno);
    }
    return m;
}

inline void write_report_csv(std::ostream& out, const EvalReport& r) {
    out << "metric,class,value\n";
    for (std::size_t c = 0; c < r.classes.size(); ++c)
        out << "accuracy," << r.classes[c] << ',' << format_value(r.class_accuracy[c]) << '\n';
    out << "precision,macro," << format_value(r.macro_precision) << '\n';
    out << "recall,macro," << format_value(r.macro_recall) << '\n';
    out << "f1,macro," << format_value(r.macro_f1) << '\n';
    out << "accuracy,macro," << format_value(r.macro_accuracy) << '\n';
}

inline std::string format_report_table(const EvalReport& r) {
    std::ostringstream out;
    out << "class      accuracy\n";
    for (std::size_t c = 0; c < r.classes.size(); ++c) {
        out << r.classes[c];
        for (std::size_t pad = r.classes[c].size(); pad < 11; ++pad) out << ' ';
        out << format_value(r.class_accuracy[c]) << '\n';
    }
    out << "macro: precision=" << format_value(r.macro_precision)
        << " recall=" << format_value(r.macro_recall) << " f1=" << format_value(r.macro_f1)
        << " accuracy=" << format_value(r.macro_accuracy) << '\n';
    return out.str();
}

} // namespace topotext
