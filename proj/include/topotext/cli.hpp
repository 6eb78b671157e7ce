#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"

#include "topotext/block_features.hpp"
#include "topotext/classify.hpp"
#include "topotext/corpus.hpp"
#include "topotext/distance_matrix.hpp"
#include "topotext/embedding_features.hpp"
#include "topotext/embedding_table.hpp"
#include "topotext/errors.hpp"
#include "topotext/feature_io.hpp"
#include "topotext/persistence.hpp"
#include "topotext/tokenize.hpp"
#include "topotext/wasserstein.hpp"

namespace topotext::cli {

// Exit codes: 0 success, 1 parse error, 2 validation error,
// 3 more documents skipped than --allow-skipped permits.
enum ExitCode : int { kOk = 0, kParseError = 1, kValidationError = 2, kPartialFailure = 3 };

namespace detail {

// Outputs are staged in memory and written only after the whole computation
// succeeded, so failures never leave partial artifacts behind.
inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot open output file: " + path);
    out << content;
    if (!out) throw validation_error("failed writing output file: " + path);
}

struct PhOptions {
    std::string matrix_path;
    std::string out_path;
};

inline int cmd_ph(const PhOptions& opt) {
    std::ifstream in(opt.matrix_path, std::ios::binary);
    if (!in) throw parse_error("cannot open file: " + opt.matrix_path);
    const DistanceMatrix dist = read_distance_matrix(in);
    const PersistenceDiagram pd = rips_persistence(dist); // validates

    std::ostringstream out;
    write_diagram(out, pd);
    write_file(opt.out_path, out.str());
    return kOk;
}

struct SplitOptions {
    std::string corpus_path;
    std::string out_path;
    CorpusLoadConfig corpus;
};

inline int cmd_split(const SplitOptions& opt) {
    std::vector<std::string> warnings;
    const LabeledCorpus corpus = load_corpus(opt.corpus_path, opt.corpus, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

    std::ostringstream out;
    write_csv_row(out, {"id", "split"});
    for (const Document& d : corpus.docs)
        write_csv_row(out, {d.id, d.in_train ? "train" : "test"});
    write_file(opt.out_path, out.str());
    return kOk;
}

struct ExtractOptions {
    std::string corpus_path;
    std::string embeddings_path;
    std::string stoplist_path;
    std::string out_path;
    std::string mode = "both"; // tp1 | tp2 | both
    std::size_t blocks = 10;
    double wasserstein_p = 1.0;
    std::string smoothing = "truncate";
    unsigned threads = 1;
    std::size_t allow_skipped = 0;
    CorpusLoadConfig corpus;
};

inline std::unordered_set<std::string> load_stoplist(const std::string& path) {
    std::unordered_set<std::string> stop;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open stoplist file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        std::string word = topotext::detail::trim(line);
        for (char& c : word) c = topotext::detail::lower_ascii(static_cast<unsigned char>(c));
        if (!word.empty()) stop.insert(word);
    }
    return stop;
}

inline int cmd_extract(const ExtractOptions& opt) {
    const bool want_tp1 = opt.mode == "tp1" || opt.mode == "both";
    const bool want_tp2 = opt.mode == "tp2" || opt.mode == "both";
    if (want_tp1 && opt.embeddings_path.empty())
        throw validation_error("--embeddings is required when the mode includes tp1");

    std::vector<std::string> warnings;
    const LabeledCorpus corpus = load_corpus(opt.corpus_path, opt.corpus, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    if (corpus.docs.empty()) throw validation_error("corpus has no usable documents");

    std::optional<EmbeddingTable> table;
    if (want_tp1) {
        std::vector<std::string> embed_warnings;
        table = load_embeddings(opt.embeddings_path, &embed_warnings);
        for (const auto& w : embed_warnings) std::cerr << "warning: " << w << '\n';
    }

    std::unordered_set<std::string> stoplist;
    if (!opt.stoplist_path.empty()) stoplist = load_stoplist(opt.stoplist_path);

    EmbeddingTopoConfig topo_cfg;
    topo_cfg.wasserstein_p = opt.wasserstein_p;
    topo_cfg.smoothing =
        opt.smoothing == "renormalize" ? SmoothingMode::renormalize : SmoothingMode::truncate;

    const std::size_t n_docs = corpus.docs.size();
    std::vector<std::vector<double>> results(n_docs);
    std::vector<std::string> failures(n_docs);

    auto extract_one = [&](std::size_t i) {
        const Document& doc = corpus.docs[i];
        std::vector<std::string> tokens = tokenize(doc.text);
        std::vector<double> row;
        if (want_tp1) {
            const EmbeddingMatrix psi = embed_document(tokens, *table);
            const EmbeddingTopoFeatures f = embedding_topo_features(psi, topo_cfg);
            row.insert(row.end(), f.omega0.begin(), f.omega0.end());
            row.insert(row.end(), f.omega1.begin(), f.omega1.end());
        }
        if (want_tp2) {
            if (!stoplist.empty())
                std::erase_if(tokens,
                              [&](const std::string& t) { return stoplist.contains(t); });
            const TfidfTopoFeatures f = tfidf_topo_features(tokens, opt.blocks);
            const std::vector<double> flat = f.flatten();
            row.insert(row.end(), flat.begin(), flat.end());
        }
        results[i] = std::move(row);
    };

    const unsigned threads = std::max(1u, opt.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < n_docs; ++i) {
            try {
                extract_one(i);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= n_docs) return;
                    try {
                        extract_one(i);
                    } catch (const std::exception& e) {
                        failures[i] = e.what();
                    }
                }
            });
        for (auto& th : pool) th.join();
    }

    // Column layout is fixed by the embedding dimension and block count.
    std::size_t dim = 0;
    if (want_tp1) dim = table->dim();
    FeatureMatrix features;
    if (want_tp1) {
        for (std::size_t d = 1; d <= dim; ++d)
            features.columns.push_back("tp1_omega0_" + std::to_string(d));
        for (std::size_t d = 1; d <= dim; ++d)
            features.columns.push_back("tp1_omega1_" + std::to_string(d));
    }
    if (want_tp2) {
        for (std::size_t i = 1; i < opt.blocks; ++i)
            features.columns.push_back("tp2_x" + std::to_string(i));
        for (std::size_t i = 1; i <= 5; ++i)
            features.columns.push_back("tp2_y" + std::to_string(i));
    }

    std::size_t skipped = 0;
    for (std::size_t i = 0; i < n_docs; ++i) {
        if (!failures[i].empty()) {
            ++skipped;
            std::cerr << "skipping document \"" << corpus.docs[i].id << "\": " << failures[i]
                      << '\n';
            continue;
        }
        if (results[i].size() != features.columns.size())
            throw validation_error("document \"" + corpus.docs[i].id +
                                   "\" produced an unexpected feature count");
        features.row_ids.push_back(corpus.docs[i].id);
        features.values.insert(features.values.end(), results[i].begin(), results[i].end());
    }

    std::ostringstream out;
    write_feature_csv(out, features);
    write_file(opt.out_path, out.str());

    if (skipped > 0)
        std::cerr << skipped << " of " << n_docs << " documents skipped\n";
    return skipped > opt.allow_skipped ? kPartialFailure : kOk;
}

struct TrainEvalOptions {
    std::string features_path;
    std::string corpus_path;
    std::string feature_set = "tp1+tp2"; // tp1 | tp2 | tp1+tp2 | ensemble
    std::string out_path;
    std::string model_out_path;
    std::string proba_out_path;
    std::string proba_a_path;
    std::string proba_b_path;
    TrainConfig train;
    CorpusLoadConfig corpus;
};

// Reorders matrix rows to match the corpus ids exactly; any mismatch is an error.
template <typename M>
inline M align_rows(const M& m, const LabeledCorpus& corpus, const std::string& what) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < m.row_ids.size(); ++r) index.emplace(m.row_ids[r], r);
    if (index.size() != m.row_ids.size())
        throw validation_error(what + " has duplicate row ids");
    std::vector<std::size_t> order;
    for (const Document& d : corpus.docs) {
        auto it = index.find(d.id);
        if (it == index.end())
            throw validation_error("id misalignment: corpus document \"" + d.id +
                                   "\" is missing from " + what);
        order.push_back(it->second);
    }
    if (m.row_ids.size() != corpus.docs.size())
        throw validation_error("id misalignment: " + what + " has " +
                               std::to_string(m.row_ids.size()) + " rows, corpus has " +
                               std::to_string(corpus.docs.size()));
    return m.select_rows(order);
}

inline FeatureMatrix select_feature_columns(const FeatureMatrix& m, const std::string& set_name) {
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
        const bool tp1 = m.columns[c].rfind("tp1_", 0) == 0;
        const bool tp2 = m.columns[c].rfind("tp2_", 0) == 0;
        if ((set_name == "tp1" && tp1) || (set_name == "tp2" && tp2) ||
            (set_name == "tp1+tp2" && (tp1 || tp2)))
            keep.push_back(c);
    }
    if (keep.empty())
        throw validation_error("feature file has no columns for feature set \"" + set_name +
                               "\"");
    FeatureMatrix out;
    out.row_ids = m.row_ids;
    for (std::size_t c : keep) out.columns.push_back(m.columns[c]);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c : keep) out.values.push_back(m.at(r, c));
    return out;
}

inline int cmd_train_eval(const TrainEvalOptions& opt) {
    std::vector<std::string> warnings;
    const LabeledCorpus corpus = load_corpus(opt.corpus_path, opt.corpus, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    if (corpus.docs.empty()) throw validation_error("corpus has no usable documents");

    const LabelMatrix all_labels = labels_from_corpus(corpus);
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < corpus.docs.size(); ++i)
        (corpus.docs[i].in_train ? train_rows : test_rows).push_back(i);
    if (train_rows.empty() || test_rows.empty())
        throw validation_error("corpus split leaves an empty train or test set");
    const LabelMatrix train_labels = all_labels.select_rows(train_rows);
    const LabelMatrix test_labels = all_labels.select_rows(test_rows);

    EvalReport report;
    std::optional<LinearModel> model;
    std::optional<FeatureMatrix> all_proba;

    if (opt.feature_set == "ensemble") {
        if (opt.proba_a_path.empty() || opt.proba_b_path.empty())
            throw validation_error("ensemble feature set requires --proba-a and --proba-b");
        std::ifstream fa(opt.proba_a_path, std::ios::binary);
        if (!fa) throw parse_error("cannot open file: " + opt.proba_a_path);
        std::ifstream fb(opt.proba_b_path, std::ios::binary);
        if (!fb) throw parse_error("cannot open file: " + opt.proba_b_path);
        const FeatureMatrix pa = align_rows(read_proba_csv(fa), corpus, "proba-a");
        const FeatureMatrix pb = align_rows(read_proba_csv(fb), corpus, "proba-b");

        const FeatureMatrix pa_train = pa.select_rows(train_rows);
        const FeatureMatrix pb_train = pb.select_rows(train_rows);
        model = ensemble_combine(pa_train, pb_train, train_labels, opt.train);
        all_proba = ensemble_predict(*model, pa, pb);
    } else {
        if (opt.features_path.empty())
            throw validation_error("--features is required unless --feature-set is ensemble");
        std::ifstream ff(opt.features_path, std::ios::binary);
        if (!ff) throw parse_error("cannot open file: " + opt.features_path);
        const FeatureMatrix full = align_rows(read_feature_csv(ff), corpus, "feature file");
        const FeatureMatrix selected = select_feature_columns(full, opt.feature_set);
        model = train_linear(selected.select_rows(train_rows), train_labels, opt.train);
        all_proba = predict_proba(*model, selected);
    }

    report = evaluate(all_proba->select_rows(test_rows), test_labels);

    std::ostringstream report_csv;
    write_report_csv(report_csv, report);
    write_file(opt.out_path, report_csv.str());
    if (!opt.model_out_path.empty()) {
        std::ostringstream ms;
        save_model(ms, *model);
        write_file(opt.model_out_path, ms.str());
    }
    if (!opt.proba_out_path.empty()) {
        std::ostringstream ps;
        write_proba_csv(ps, *all_proba);
        write_file(opt.proba_out_path, ps.str());
    }
    std::cout << format_report_table(report);
    return kOk;
}

} // namespace detail

inline int run(int argc, const char* const* argv) {
    CLI::App app{"Topological text features: Rips persistence over documents"};
    app.require_subcommand(1);

    detail::PhOptions ph;
    auto* ph_cmd = app.add_subcommand(
        "ph", "Persistence diagram (dims 0 and 1) of a distance matrix file");
    ph_cmd->add_option("matrix", ph.matrix_path, "distance matrix file (n, then n rows)")
        ->required();
    ph_cmd->add_option("-o,--out", ph.out_path, "output diagram file")->required();

    std::string split_delim = "|", extract_delim = "|", te_delim = "|";

    detail::SplitOptions split;
    auto* split_cmd = app.add_subcommand("split", "Deterministic 2/3-1/3 train/test split");
    split_cmd->add_option("--corpus", split.corpus_path, "corpus CSV (id,text,labels)")
        ->required();
    split_cmd->add_option("-o,--out", split.out_path, "output split CSV")->required();
    split_cmd->add_option("--seed", split.corpus.seed, "split seed");
    split_cmd->add_option("--min-tokens", split.corpus.min_tokens,
                          "drop documents with fewer tokens");
    split_cmd->add_option("--label-delim", split_delim, "label field delimiter");

    detail::ExtractOptions extract;
    auto* extract_cmd =
        app.add_subcommand("extract", "Extract topological features from a corpus");
    extract_cmd->add_option("--corpus", extract.corpus_path, "corpus CSV (id,text,labels)")
        ->required();
    extract_cmd->add_option("--embeddings", extract.embeddings_path,
                            "word2vec-text embedding file (required for tp1)");
    extract_cmd->add_option("--mode", extract.mode, "feature family to extract")
        ->check(CLI::IsMember({"tp1", "tp2", "both"}));
    extract_cmd->add_option("-o,--out", extract.out_path, "output feature CSV")->required();
    extract_cmd->add_option("--blocks", extract.blocks, "tp2 block count")->check(CLI::Range(1, 1000));
    extract_cmd->add_option("--wasserstein-p", extract.wasserstein_p, "Wasserstein order p");
    extract_cmd->add_option("--smoothing", extract.smoothing, "boundary handling for smoothing")
        ->check(CLI::IsMember({"truncate", "renormalize"}));
    extract_cmd->add_option("--min-tokens", extract.corpus.min_tokens,
                            "drop documents with fewer tokens");
    extract_cmd->add_option("--seed", extract.corpus.seed, "split seed recorded in the corpus");
    extract_cmd->add_option("--threads", extract.threads, "worker threads across documents");
    extract_cmd->add_option("--stoplist", extract.stoplist_path,
                            "stop-word file applied to tp2 tokens");
    extract_cmd->add_option("--allow-skipped", extract.allow_skipped,
                            "max documents that may fail before exit code 3");
    extract_cmd->add_option("--label-delim", extract_delim, "label field delimiter");

    detail::TrainEvalOptions te;
    auto* te_cmd = app.add_subcommand(
        "train-eval", "Train one-vs-rest logistic models on the train split, report on test");
    te_cmd->add_option("--features", te.features_path, "feature CSV from extract");
    te_cmd->add_option("--corpus", te.corpus_path, "corpus CSV (labels and split)")->required();
    te_cmd->add_option("--feature-set", te.feature_set, "columns to train on")
        ->check(CLI::IsMember({"tp1", "tp2", "tp1+tp2", "ensemble"}));
    te_cmd->add_option("-o,--out", te.out_path, "output evaluation report CSV")->required();
    te_cmd->add_option("--model-out", te.model_out_path, "write model coefficients here");
    te_cmd->add_option("--proba-out", te.proba_out_path,
                       "write per-document class probabilities here");
    te_cmd->add_option("--proba-a", te.proba_a_path, "first probability source (ensemble)");
    te_cmd->add_option("--proba-b", te.proba_b_path, "second probability source (ensemble)");
    te_cmd->add_option("--min-tokens", te.corpus.min_tokens, "drop documents with fewer tokens");
    te_cmd->add_option("--seed", te.corpus.seed, "split seed");
    te_cmd->add_option("--ridge", te.train.ridge_lambda, "L2 strength for the logistic models");
    te_cmd->add_option("--max-iter", te.train.max_iter, "Newton iteration cap");
    te_cmd->add_option("--label-delim", te_delim, "label field delimiter");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kParseError;
    }

    try {
        auto apply_delim = [](CorpusLoadConfig& cfg, const std::string& s) {
            if (s.size() != 1)
                throw validation_error("--label-delim must be a single character");
            cfg.label_delimiter = s[0];
        };
        apply_delim(split.corpus, split_delim);
        apply_delim(extract.corpus, extract_delim);
        apply_delim(te.corpus, te_delim);

        if (ph_cmd->parsed()) return detail::cmd_ph(ph);
        if (split_cmd->parsed()) return detail::cmd_split(split);
        if (extract_cmd->parsed()) return detail::cmd_extract(extract);
        if (te_cmd->parsed()) return detail::cmd_train_eval(te);
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationError;
    }
    return kOk;
}

} // namespace topotext::cli
