/*
 * Copyright 2026 emoforge contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef EMOFORGE_RUNNER_HPP
#define EMOFORGE_RUNNER_HPP

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "emoforge/corpus.hpp"
#include "emoforge/metrics.hpp"
#include "emoforge/model_io.hpp"
#include "emoforge/textprep.hpp"

namespace emoforge {

struct CnnGridConfig {
    bool enabled = false;
    int max_features = 10000; // vocabulary cap for the sequence path
    int embed_dim = 32;
    int filters = 64;
    int kernel = 3;
    int max_len = 40;
    int epochs = 10;
    int batch_size = 64;
    double learning_rate = 0.1;
};

struct ExperimentConfig {
    std::string data;
    CorpusFormat format = CorpusFormat::csv;
    double train_fraction = 0.7;
    std::uint64_t seed = 42;
    int min_df = 1;
    double max_df = 1.0;
    std::vector<int> feature_counts = {10000, 20000, 30000, 40000};
    std::vector<std::string> classifiers = {"logreg",   "svm-linear", "svm-rbf",
                                            "dtree",    "adaboost",   "rforest"};
    nlohmann::json overrides = nlohmann::json::object(); // per-classifier hyperparameters
    CnnGridConfig cnn;
    std::string out_dir = ".";
    int jobs = 1;
    bool save_models = true;
};

namespace detail {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (j.is_object() && j.contains(key)) return j.at(key).get<T>();
    return fallback;
}

} // namespace detail

/// Parse an experiment config document and validate it. The environment
/// variable EMOFORGE_SEED, when set, overrides the config seed.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.data = detail::get_or<std::string>(j, "data", "");
    if (cfg.data.empty()) throw ConfigError("grid config needs a \"data\" path");
    const std::string fmt = detail::get_or<std::string>(j, "format", "csv");
    if (fmt == "csv") cfg.format = CorpusFormat::csv;
    else if (fmt == "tsv") cfg.format = CorpusFormat::tsv;
    else throw ConfigError("format must be csv or tsv, got \"" + fmt + "\"");
    cfg.train_fraction = detail::get_or<double>(j, "train_fraction", 0.7);
    cfg.seed = detail::get_or<std::uint64_t>(j, "seed", 42);
    cfg.min_df = detail::get_or<int>(j, "min_df", 1);
    cfg.max_df = detail::get_or<double>(j, "max_df", 1.0);
    if (j.contains("feature_counts")) {
        cfg.feature_counts = j.at("feature_counts").get<std::vector<int>>();
    }
    if (cfg.feature_counts.empty()) throw ConfigError("feature_counts must be non-empty");
    for (std::size_t i = 0; i < cfg.feature_counts.size(); ++i) {
        if (cfg.feature_counts[i] < 1 ||
            (i > 0 && cfg.feature_counts[i] <= cfg.feature_counts[i - 1])) {
            throw ConfigError("feature_counts must be strictly increasing positive integers");
        }
    }
    if (j.contains("classifiers")) {
        cfg.classifiers = j.at("classifiers").get<std::vector<std::string>>();
    }
    for (const auto& name : cfg.classifiers) {
        const ModelKind kind = parse_model_kind(name); // throws on unknown names
        if (kind == ModelKind::cnn) {
            throw ConfigError("the CNN runs outside the feature sweep; use the \"cnn\" block");
        }
    }
    if (j.contains("overrides")) cfg.overrides = j.at("overrides");
    if (j.contains("cnn")) {
        const auto& c = j.at("cnn");
        cfg.cnn.enabled = detail::get_or<bool>(c, "enabled", true);
        cfg.cnn.max_features = detail::get_or<int>(c, "max_features", cfg.cnn.max_features);
        cfg.cnn.embed_dim = detail::get_or<int>(c, "embed_dim", cfg.cnn.embed_dim);
        cfg.cnn.filters = detail::get_or<int>(c, "filters", cfg.cnn.filters);
        cfg.cnn.kernel = detail::get_or<int>(c, "kernel", cfg.cnn.kernel);
        cfg.cnn.max_len = detail::get_or<int>(c, "max_len", cfg.cnn.max_len);
        cfg.cnn.epochs = detail::get_or<int>(c, "epochs", cfg.cnn.epochs);
        cfg.cnn.batch_size = detail::get_or<int>(c, "batch_size", cfg.cnn.batch_size);
        cfg.cnn.learning_rate = detail::get_or<double>(c, "learning_rate", cfg.cnn.learning_rate);
    }
    cfg.out_dir = detail::get_or<std::string>(j, "out_dir", ".");
    cfg.jobs = detail::get_or<int>(j, "jobs", 1);
    cfg.save_models = detail::get_or<bool>(j, "save_models", true);

    if (const char* env = std::getenv("EMOFORGE_SEED")) {
        cfg.seed = std::strtoull(env, nullptr, 10);
    }
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open grid config: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed grid config " + path.string() + ": " + e.what());
    }
    return experiment_config_from_json(j);
}

/// Train one classical model kind with per-kind hyperparameters taken from a
/// JSON object (absent keys keep the documented defaults).
inline TrainedClassifier train_classical_model(ModelKind kind,
                                               std::span<const SparseVector> X,
                                               std::span<const Label> y,
                                               const TfidfModel& tfidf, std::uint64_t seed,
                                               const nlohmann::json& hp = {}) {
    TrainedClassifier tc;
    tc.kind = kind;
    tc.tfidf = tfidf;
    const int V = static_cast<int>(tfidf.vocab_size());
    using detail::get_or;
    switch (kind) {
    case ModelKind::logreg: {
        TrainConfig cfg;
        cfg.learning_rate = get_or<double>(hp, "learning_rate", cfg.learning_rate);
        cfg.l2 = get_or<double>(hp, "l2", cfg.l2);
        cfg.max_epochs = get_or<int>(hp, "max_epochs", cfg.max_epochs);
        cfg.tolerance = get_or<double>(hp, "tolerance", cfg.tolerance);
        cfg.batch_size = get_or<int>(hp, "batch_size", cfg.batch_size);
        cfg.seed = seed;
        cfg.n_features = V;
        tc.model = train_logistic(X, y, cfg);
        break;
    }
    case ModelKind::svm_linear: {
        TrainConfig cfg = linear_svm_defaults();
        cfg.learning_rate = get_or<double>(hp, "learning_rate", cfg.learning_rate);
        cfg.l2 = get_or<double>(hp, "l2", cfg.l2);
        cfg.max_epochs = get_or<int>(hp, "max_epochs", cfg.max_epochs);
        cfg.tolerance = get_or<double>(hp, "tolerance", cfg.tolerance);
        cfg.batch_size = get_or<int>(hp, "batch_size", cfg.batch_size);
        cfg.seed = seed;
        cfg.n_features = V;
        tc.model = train_linear_svm(X, y, cfg);
        break;
    }
    case ModelKind::svm_rbf: {
        RbfConfig cfg;
        cfg.gamma = get_or<double>(hp, "gamma", cfg.gamma);
        cfg.c_reg = get_or<double>(hp, "c_reg", cfg.c_reg);
        cfg.tolerance = get_or<double>(hp, "tolerance", cfg.tolerance);
        cfg.max_passes = get_or<int>(hp, "max_passes", cfg.max_passes);
        cfg.sample_cap = get_or<std::size_t>(hp, "sample_cap", cfg.sample_cap);
        cfg.seed = seed;
        cfg.n_features = V;
        tc.model = train_rbf_svm(X, y, cfg);
        break;
    }
    case ModelKind::dtree: {
        TreeConfig cfg;
        cfg.max_depth = get_or<int>(hp, "max_depth", cfg.max_depth);
        cfg.min_samples_leaf = get_or<int>(hp, "min_samples_leaf", cfg.min_samples_leaf);
        cfg.n_features = V;
        tc.model = train_decision_tree(X, y, cfg);
        break;
    }
    case ModelKind::adaboost: {
        BoostConfig cfg;
        cfg.n_stages = get_or<int>(hp, "n_stages", cfg.n_stages);
        cfg.base_depth = get_or<int>(hp, "base_depth", cfg.base_depth);
        cfg.min_samples_leaf = get_or<int>(hp, "min_samples_leaf", cfg.min_samples_leaf);
        cfg.n_features = V;
        tc.model = train_adaboost(X, y, cfg);
        break;
    }
    case ModelKind::rforest: {
        ForestConfig cfg;
        cfg.n_trees = get_or<int>(hp, "n_trees", cfg.n_trees);
        cfg.max_depth = get_or<int>(hp, "max_depth", cfg.max_depth);
        cfg.min_samples_leaf = get_or<int>(hp, "min_samples_leaf", cfg.min_samples_leaf);
        cfg.bootstrap = get_or<bool>(hp, "bootstrap", cfg.bootstrap);
        cfg.feature_subsample = get_or<bool>(hp, "feature_subsample", cfg.feature_subsample);
        cfg.seed = seed;
        cfg.n_features = V;
        tc.model = train_random_forest(X, y, cfg);
        break;
    }
    case ModelKind::cnn:
        throw ConfigError("train_classical_model does not handle the CNN");
    }
    return tc;
}

struct GridCell {
    int features = 0;
    std::string classifier;
    bool ok = false;
    std::string error;
    MetricsReport report{};
    double train_seconds = 0.0;
    double eval_seconds = 0.0;
};

struct CnnGridResult {
    bool ran = false;
    bool ok = false;
    std::string error;
    MetricsReport report{};
    double train_seconds = 0.0;
    TrainHistory history;
};

struct GridResult {
    std::vector<GridCell> cells;
    CnnGridResult cnn;

    bool all_ok() const {
        for (const auto& c : cells) {
            if (!c.ok) return false;
        }
        if (cnn.ran && !cnn.ok) return false;
        return true;
    }
};

/// results.csv content: successful classical cells in grid order.
inline std::string grid_csv(const GridResult& result) {
    std::string out = "features,classifier,accuracy,precision,recall,f_score\n";
    for (const auto& c : result.cells) {
        if (!c.ok) continue;
        out += report_csv_row(c.features, c.classifier, c.report);
        out.push_back('\n');
    }
    return out;
}

struct GridCsvRow {
    int features = 0;
    std::string classifier;
    std::string accuracy, precision, recall, f_score;
};

inline std::vector<GridCsvRow> parse_grid_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) ||
        line != "features,classifier,accuracy,precision,recall,f_score") {
        throw ParseError("unexpected grid CSV header: " + line);
    }
    std::vector<GridCsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        GridCsvRow row;
        std::string field;
        std::getline(ls, field, ',');
        row.features = std::stoi(field);
        std::getline(ls, row.classifier, ',');
        std::getline(ls, row.accuracy, ',');
        std::getline(ls, row.precision, ',');
        std::getline(ls, row.recall, ',');
        std::getline(ls, row.f_score, ',');
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Human-readable aligned table, classical sweep on top, a deep-learning
/// section below when the CNN ran, failures listed at the end.
inline std::string grid_table(const GridResult& result) {
    std::ostringstream out;
    out << std::left << std::setw(10) << "features" << std::setw(14) << "classifier"
        << std::right << std::setw(10) << "accuracy" << std::setw(11) << "precision"
        << std::setw(8) << "recall" << std::setw(9) << "f_score" << std::setw(10)
        << "train_s" << std::setw(9) << "eval_s" << '\n';
    for (const auto& c : result.cells) {
        if (!c.ok) continue;
        out << std::left << std::setw(10) << c.features << std::setw(14) << c.classifier
            << std::right << std::setw(10) << format_percent(c.report.accuracy)
            << std::setw(11) << format_percent(c.report.weighted_precision)
            << std::setw(8) << format_percent(c.report.weighted_recall)
            << std::setw(9) << format_percent(c.report.weighted_f1)
            << std::setw(10) << std::fixed << std::setprecision(2) << c.train_seconds
            << std::setw(9) << c.eval_seconds << std::defaultfloat << '\n';
    }
    if (result.cnn.ran && result.cnn.ok) {
        out << "\ndeep learning (sequence path)\n";
        out << std::left << std::setw(10) << "algorithm" << std::right << std::setw(10)
            << "accuracy" << std::setw(11) << "precision" << std::setw(8) << "recall"
            << std::setw(9) << "f_score" << std::setw(10) << "train_s" << '\n';
        out << std::left << std::setw(10) << "cnn" << std::right << std::setw(10)
            << format_percent(result.cnn.report.accuracy) << std::setw(11)
            << format_percent(result.cnn.report.weighted_precision) << std::setw(8)
            << format_percent(result.cnn.report.weighted_recall) << std::setw(9)
            << format_percent(result.cnn.report.weighted_f1) << std::setw(10) << std::fixed
            << std::setprecision(2) << result.cnn.train_seconds << std::defaultfloat << '\n';
    }
    bool header = false;
    for (const auto& c : result.cells) {
        if (c.ok) continue;
        if (!header) {
            out << "\nfailed cells\n";
            header = true;
        }
        out << c.features << '/' << c.classifier << ": " << c.error << '\n';
    }
    if (result.cnn.ran && !result.cnn.ok) {
        out << "\ncnn failed: " << result.cnn.error << '\n';
    }
    return out.str();
}

/// The §-style experiment sweep: one TF-IDF fit per feature count on the
/// train split only, every requested classifier trained and evaluated on the
/// held-out split, the CNN once per grid on the sequence path. Cells with
/// independent inputs may run concurrently (jobs > 1) without changing any
/// reported number: each cell derives its generators from config seed + cell
/// index. Writes results.csv, results.txt, cnn_history.csv and model files
/// into out_dir.
inline GridResult run_grid(const ExperimentConfig& config) {
    namespace fs = std::filesystem;
    const auto docs = load_corpus(config.data, config.format);
    const auto split = stratified_split(docs, config.train_fraction, config.seed);
    const auto tok_train = tokenize_corpus(split.train);
    const auto tok_test = tokenize_corpus(split.test);
    std::vector<Label> y_train, y_test;
    for (const auto& d : tok_train) y_train.push_back(d.label);
    for (const auto& d : tok_test) y_test.push_back(d.label);

    fs::create_directories(config.out_dir);

    GridResult result;
    const std::size_t n_classifiers = config.classifiers.size();
    result.cells.resize(config.feature_counts.size() * n_classifiers);

    for (std::size_t fc_idx = 0; fc_idx < config.feature_counts.size(); ++fc_idx) {
        const int features = config.feature_counts[fc_idx];
        TfidfConfig tfidf_config{config.min_df, config.max_df, features};
        const TfidfModel tfidf = TfidfModel::fit(tok_train, tfidf_config);
        const auto X_train = tfidf.transform_all(tok_train);
        const auto X_test = tfidf.transform_all(tok_test);

        auto run_cell = [&, features](std::size_t clf_idx) {
            const std::size_t cell_index = fc_idx * n_classifiers + clf_idx;
            GridCell& cell = result.cells[cell_index];
            cell.features = features;
            cell.classifier = config.classifiers[clf_idx];
            const std::uint64_t cell_seed = config.seed + cell_index;
            try {
                const ModelKind kind = parse_model_kind(cell.classifier);
                const nlohmann::json hp = config.overrides.contains(cell.classifier)
                    ? config.overrides.at(cell.classifier)
                    : nlohmann::json::object();
                const auto t0 = std::chrono::steady_clock::now();
                TrainedClassifier tc =
                    train_classical_model(kind, X_train, y_train, tfidf, cell_seed, hp);
                const auto t1 = std::chrono::steady_clock::now();
                std::vector<Label> pred;
                pred.reserve(X_test.size());
                for (const auto& v : X_test) {
                    switch (kind) {
                    case ModelKind::logreg:
                    case ModelKind::svm_linear:
                        pred.push_back(predict_one(std::get<LinearModel>(tc.model), v));
                        break;
                    case ModelKind::svm_rbf:
                        pred.push_back(predict_one(std::get<KernelSvmModel>(tc.model), v));
                        break;
                    case ModelKind::dtree:
                        pred.push_back(std::get<DecisionTree>(tc.model).predict(v));
                        break;
                    case ModelKind::adaboost:
                        pred.push_back(std::get<BoostEnsemble>(tc.model).predict(v));
                        break;
                    case ModelKind::rforest:
                        pred.push_back(std::get<Forest>(tc.model).predict(v));
                        break;
                    default:
                        break;
                    }
                }
                const auto t2 = std::chrono::steady_clock::now();
                cell.report = weighted_report(confusion(y_test, pred));
                cell.train_seconds = std::chrono::duration<double>(t1 - t0).count();
                cell.eval_seconds = std::chrono::duration<double>(t2 - t1).count();
                cell.ok = true;
                if (config.save_models) {
                    const fs::path path = fs::path(config.out_dir) /
                        ("model_" + std::to_string(features) + "_" + cell.classifier + ".json");
                    save_model(tc, path);
                }
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
            }
        };

        if (config.jobs <= 1) {
            for (std::size_t clf_idx = 0; clf_idx < n_classifiers; ++clf_idx) run_cell(clf_idx);
        } else {
            std::vector<std::future<void>> wave;
            for (std::size_t clf_idx = 0; clf_idx < n_classifiers; ++clf_idx) {
                wave.push_back(std::async(std::launch::async, run_cell, clf_idx));
                if (wave.size() == static_cast<std::size_t>(config.jobs)) {
                    for (auto& f : wave) f.get();
                    wave.clear();
                }
            }
            for (auto& f : wave) f.get();
        }
    }

    if (config.cnn.enabled) {
        result.cnn.ran = true;
        try {
            const std::uint64_t cnn_seed = config.seed + result.cells.size();
            TfidfConfig seq_config{config.min_df, config.max_df, config.cnn.max_features};
            const TfidfModel tfidf = TfidfModel::fit(tok_train, seq_config);
            const auto train_batch = tfidf.encode_sequences(tok_train, config.cnn.max_len);
            const auto test_batch = tfidf.encode_sequences(tok_test, config.cnn.max_len);

            CnnTrainConfig train_config;
            train_config.model.embed_dim = config.cnn.embed_dim;
            train_config.model.filters = config.cnn.filters;
            train_config.model.kernel = config.cnn.kernel;
            train_config.model.max_len = config.cnn.max_len;
            train_config.model.seed = cnn_seed;
            train_config.vocab_size = static_cast<int>(tfidf.vocab_size());
            train_config.epochs = config.cnn.epochs;
            train_config.batch_size = config.cnn.batch_size;
            train_config.learning_rate = config.cnn.learning_rate;

            const auto t0 = std::chrono::steady_clock::now();
            auto [model, history] = train_cnn(train_batch, y_train, train_config);
            result.cnn.train_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            result.cnn.history = std::move(history);

            const auto pred = cnn_predict(model, test_batch);
            result.cnn.report = weighted_report(confusion(y_test, pred));
            result.cnn.ok = true;

            if (config.save_models) {
                TrainedClassifier tc;
                tc.kind = ModelKind::cnn;
                tc.tfidf = tfidf;
                tc.max_len = config.cnn.max_len;
                tc.model = std::move(model);
                save_model(tc, fs::path(config.out_dir) / "model_cnn.json");
            }
            std::ofstream hist(fs::path(config.out_dir) / "cnn_history.csv");
            hist << result.cnn.history.to_csv();
        } catch (const std::exception& e) {
            result.cnn.ok = false;
            result.cnn.error = e.what();
        }
    }

    std::ofstream csv(fs::path(config.out_dir) / "results.csv");
    if (!csv) throw IoError("cannot write results.csv in " + config.out_dir);
    csv << grid_csv(result);
    std::ofstream table(fs::path(config.out_dir) / "results.txt");
    table << grid_table(result);
    return result;
}

} // namespace emoforge

#endif // EMOFORGE_RUNNER_HPP
