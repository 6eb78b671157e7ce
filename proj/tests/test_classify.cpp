#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "topotext/classify.hpp"
#include "topotext/feature_io.hpp"

using namespace topotext;

namespace {

FeatureMatrix make_features(std::vector<std::string> cols, std::vector<std::vector<double>> rows) {
    FeatureMatrix m;
    m.columns = std::move(cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        m.row_ids.push_back("r" + std::to_string(r));
        m.values.insert(m.values.end(), rows[r].begin(), rows[r].end());
    }
    return m;
}

LabelMatrix make_labels(std::vector<std::string> classes, std::vector<std::vector<int>> rows) {
    LabelMatrix l;
    l.classes = std::move(classes);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        l.row_ids.push_back("r" + std::to_string(r));
        for (int v : rows[r]) l.values.push_back(static_cast<std::uint8_t>(v));
    }
    return l;
}

double train_logloss(const FeatureMatrix& proba, const LabelMatrix& labels) {
    double loss = 0.0;
    for (std::size_t r = 0; r < proba.rows(); ++r)
        for (std::size_t c = 0; c < proba.cols(); ++c) {
            const double p = std::clamp(proba.at(r, c), 1e-12, 1.0 - 1e-12);
            loss -= labels.at(r, c) ? std::log(p) : std::log(1.0 - p);
        }
    return loss;
}

// Two-feature set, 24 rows, cleanly separable on the first feature.
void separable_toy(FeatureMatrix& f, LabelMatrix& l) {
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<int>> labels;
    for (int i = 0; i < 12; ++i) {
        rows.push_back({1.0 + 0.05 * i, 0.3 * (i % 3)});
        labels.push_back({1});
        rows.push_back({-1.0 - 0.05 * i, 0.3 * ((i + 1) % 3)});
        labels.push_back({0});
    }
    f = make_features({"f1", "f2"}, rows);
    l = make_labels({"drama"}, labels);
}

} // namespace

TEST_CASE("separable toy set reaches training accuracy 1") {
    FeatureMatrix f;
    LabelMatrix l;
    separable_toy(f, l);
    const auto model = train_linear(f, l);
    const auto report = evaluate(predict_proba(model, f), l);
    CHECK(report.class_accuracy[0] == doctest::Approx(1.0));
}

TEST_CASE("identical rows learn the class prior") {
    std::vector<std::vector<double>> rows(20, std::vector<double>{1.5, -2.0});
    std::vector<std::vector<int>> labels;
    for (int i = 0; i < 20; ++i) labels.push_back({i < 13 ? 1 : 0});
    const auto f = make_features({"f1", "f2"}, rows);
    const auto l = make_labels({"drama"}, labels);
    const auto proba = predict_proba(train_linear(f, l), f);
    for (std::size_t r = 0; r < proba.rows(); ++r)
        CHECK(proba.at(r, 0) == doctest::Approx(13.0 / 20.0).epsilon(1e-6));
}

TEST_CASE("training is deterministic") {
    FeatureMatrix f;
    LabelMatrix l;
    separable_toy(f, l);
    const auto m1 = train_linear(f, l);
    const auto m2 = train_linear(f, l);
    CHECK(m1.weights == m2.weights);
    CHECK(m1.mean == m2.mean);
    CHECK(m1.scale == m2.scale);
}

TEST_CASE("degenerate label columns are rejected by name") {
    const auto f = make_features({"f1"}, std::vector<std::vector<double>>(12, {1.0}));
    std::vector<std::vector<int>> all_pos(12, {1});
    const auto l = make_labels({"comedy"}, all_pos);
    CHECK_THROWS_WITH_AS(train_linear(f, l), doctest::Contains("comedy"), validation_error);
}

TEST_CASE("too few positives per class is rejected") {
    std::vector<std::vector<double>> rows(12, {1.0});
    std::vector<std::vector<int>> labels(12, {0});
    labels[0] = {1};
    labels[1] = {1};
    const auto f = make_features({"f1"}, rows);
    const auto l = make_labels({"drama"}, labels);
    CHECK_THROWS_WITH_AS(train_linear(f, l), doctest::Contains("at least 10"), validation_error);
}

TEST_CASE("probabilities stay in the unit interval") {
    FeatureMatrix f;
    LabelMatrix l;
    separable_toy(f, l);
    const auto proba = predict_proba(train_linear(f, l), f);
    for (double v : proba.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(std::isfinite(v));
    }
}

namespace {

// Noisy two-class probability sources over 40 rows with fixed labels.
void ensemble_fixture(FeatureMatrix& pa, FeatureMatrix& pb, LabelMatrix& labels) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> noise(-0.25, 0.25);
    std::vector<std::vector<int>> lab;
    std::vector<std::vector<double>> a, b;
    for (int i = 0; i < 40; ++i) {
        const int y0 = (i % 2), y1 = (i % 3 == 0) ? 1 : 0;
        lab.push_back({y0, y1});
        a.push_back({std::clamp(0.5 + (y0 ? 0.3 : -0.3) + noise(rng), 0.0, 1.0),
                     std::clamp(0.5 + noise(rng), 0.0, 1.0)});
        b.push_back({std::clamp(0.5 + noise(rng), 0.0, 1.0),
                     std::clamp(0.5 + (y1 ? 0.3 : -0.3) + noise(rng), 0.0, 1.0)});
    }
    pa = make_features({"drama", "comedy"}, a);
    pb = make_features({"drama", "comedy"}, b);
    labels = make_labels({"drama", "comedy"}, lab);
}

} // namespace

TEST_CASE("ensemble of a source with itself adds nothing") {
    FeatureMatrix pa, pb;
    LabelMatrix labels;
    ensemble_fixture(pa, pb, labels);

    // Single-source baseline: the same logistic stack over pa's columns only.
    TrainConfig cfg;
    cfg.ridge_lambda = 1e-8; // keep the duplicated-column penalty split negligible
    const auto solo = train_linear(pa, labels, cfg);
    const auto duo = ensemble_combine(pa, pa, labels, cfg);
    const auto r1 = evaluate(predict_proba(solo, pa), labels);
    const auto r2 = evaluate(ensemble_predict(duo, pa, pa), labels);
    CHECK(r1.macro_f1 == doctest::Approx(r2.macro_f1).epsilon(1e-9));
    CHECK(r1.macro_accuracy == doctest::Approx(r2.macro_accuracy).epsilon(1e-9));
    CHECK(r1.macro_precision == doctest::Approx(r2.macro_precision).epsilon(1e-9));
    CHECK(r1.macro_recall == doctest::Approx(r2.macro_recall).epsilon(1e-9));
}

TEST_CASE("ensemble with the truth as one source is perfect") {
    FeatureMatrix pa, pb;
    LabelMatrix labels;
    ensemble_fixture(pa, pb, labels);
    FeatureMatrix truth = pa;
    for (std::size_t r = 0; r < labels.rows(); ++r)
        for (std::size_t c = 0; c < labels.classes.size(); ++c)
            truth.values[r * 2 + c] = labels.at(r, c) ? 1.0 : 0.0;

    const auto model = ensemble_combine(truth, pb, labels);
    const auto report = evaluate(ensemble_predict(model, truth, pb), labels);
    CHECK(report.macro_accuracy == doctest::Approx(1.0));
}

TEST_CASE("swapping the ensemble inputs swaps nothing observable") {
    FeatureMatrix pa, pb;
    LabelMatrix labels;
    ensemble_fixture(pa, pb, labels);
    const auto ab = ensemble_predict(ensemble_combine(pa, pb, labels), pa, pb);
    const auto ba = ensemble_predict(ensemble_combine(pb, pa, labels), pb, pa);
    REQUIRE(ab.values.size() == ba.values.size());
    for (std::size_t i = 0; i < ab.values.size(); ++i)
        CHECK(ab.values[i] == doctest::Approx(ba.values[i]).epsilon(1e-9));
}

TEST_CASE("a constant second source cannot hurt the training log-loss") {
    FeatureMatrix pa, pb;
    LabelMatrix labels;
    ensemble_fixture(pa, pb, labels);
    FeatureMatrix constant = pa;
    for (auto& v : constant.values) v = 0.5;

    // Standardization maps a constant column to zero, so the padded ensemble
    // solves the same problem as the single-source model.
    const auto base = train_linear(pa, labels);
    const auto padded = ensemble_combine(pa, constant, labels);
    const double base_loss = train_logloss(predict_proba(base, pa), labels);
    const double padded_loss = train_logloss(ensemble_predict(padded, pa, constant), labels);
    CHECK(padded_loss <= base_loss + 1e-9);
}

TEST_CASE("misaligned ensemble inputs are rejected") {
    FeatureMatrix pa, pb;
    LabelMatrix labels;
    ensemble_fixture(pa, pb, labels);
    FeatureMatrix wrong = pb;
    wrong.row_ids[3] = "other";
    CHECK_THROWS_AS(ensemble_combine(pa, wrong, labels), validation_error);
    FeatureMatrix bad_cols = pb;
    bad_cols.columns = {"drama", "horror"};
    CHECK_THROWS_AS(ensemble_combine(pa, bad_cols, labels), validation_error);
}

TEST_CASE("evaluate") {
    SUBCASE("perfect predictions score 1 everywhere") {
        const auto l = make_labels({"drama", "comedy"}, {{1, 0}, {0, 1}, {1, 1}, {0, 0}});
        FeatureMatrix proba;
        proba.row_ids = l.row_ids;
        proba.columns = l.classes;
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 2; ++c)
                proba.values.push_back(l.at(r, c) ? 0.9 : 0.1);
        const auto report = evaluate(proba, l);
        CHECK(report.macro_precision == doctest::Approx(1.0));
        CHECK(report.macro_recall == doctest::Approx(1.0));
        CHECK(report.macro_f1 == doctest::Approx(1.0));
        CHECK(report.macro_accuracy == doctest::Approx(1.0));
    }
    SUBCASE("all-negative predictions use the zero-denominator convention") {
        const auto l = make_labels({"drama"}, {{1}, {1}, {0}});
        FeatureMatrix proba;
        proba.row_ids = l.row_ids;
        proba.columns = l.classes;
        proba.values = {0.1, 0.2, 0.3};
        const auto report = evaluate(proba, l);
        CHECK(report.macro_recall == 0.0);
        CHECK(report.macro_precision == 0.0);
        CHECK(report.macro_f1 == 0.0);
        CHECK(report.class_accuracy[0] == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("row permutation leaves the metrics unchanged") {
        FeatureMatrix pa, pb;
        LabelMatrix labels;
        ensemble_fixture(pa, pb, labels);
        const auto base = evaluate(pa, labels);

        std::vector<std::size_t> perm(labels.rows());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::reverse(perm.begin(), perm.end());
        const auto shuffled = evaluate(pa.select_rows(perm), labels.select_rows(perm));
        CHECK(base.macro_f1 == doctest::Approx(shuffled.macro_f1));
        CHECK(base.macro_accuracy == doctest::Approx(shuffled.macro_accuracy));
        CHECK(base.macro_precision == doctest::Approx(shuffled.macro_precision));
    }
    SUBCASE("macro f1 is the unweighted mean of per-class f1") {
        FeatureMatrix pa, pb;
        LabelMatrix labels;
        ensemble_fixture(pa, pb, labels);
        const auto report = evaluate(pa, labels);

        double f1_sum = 0.0;
        for (std::size_t c = 0; c < labels.classes.size(); ++c) {
            std::size_t tp = 0, fp = 0, fn = 0;
            for (std::size_t r = 0; r < labels.rows(); ++r) {
                const bool pred = pa.at(r, c) >= 0.5;
                const bool truth = labels.at(r, c);
                tp += pred && truth;
                fp += pred && !truth;
                fn += !pred && truth;
            }
            const double p = (tp + fp) ? double(tp) / (tp + fp) : 0.0;
            const double rec = (tp + fn) ? double(tp) / (tp + fn) : 0.0;
            f1_sum += (p + rec) ? 2 * p * rec / (p + rec) : 0.0;
        }
        CHECK(report.macro_f1 == doctest::Approx(f1_sum / double(labels.classes.size())));
    }
}

TEST_CASE("model file round trip") {
    FeatureMatrix f;
    LabelMatrix l;
    separable_toy(f, l);
    const auto model = train_linear(f, l);

    std::ostringstream out;
    save_model(out, model);
    std::istringstream in(out.str());
    const auto back = load_model(in);
    CHECK(back.classes == model.classes);
    CHECK(back.feature_names == model.feature_names);
    REQUIRE(back.weights.size() == model.weights.size());
    for (std::size_t c = 0; c < model.weights.size(); ++c)
        for (std::size_t j = 0; j < model.weights[c].size(); ++j)
            CHECK(back.weights[c][j] == doctest::Approx(model.weights[c][j]).epsilon(1e-10));

    const auto before = predict_proba(model, f);
    const auto after = predict_proba(back, f);
    for (std::size_t i = 0; i < before.values.size(); ++i)
        CHECK(before.values[i] == doctest::Approx(after.values[i]).epsilon(1e-9));
}
