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

#ifndef EMOFORGE_CLI_HPP
#define EMOFORGE_CLI_HPP

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emoforge/runner.hpp"
#include "emoforge/tagcloud.hpp"

namespace emoforge::cli {

namespace detail {

inline CorpusFormat parse_format(const std::string& s) {
    if (s == "csv") return CorpusFormat::csv;
    if (s == "tsv") return CorpusFormat::tsv;
    throw ConfigError("format must be csv or tsv, got \"" + s + "\"");
}

struct TrainOptions {
    std::string model_kind = "logreg";
    std::string input = "train.csv";
    std::string format = "csv";
    std::string output = "model.json";
    std::string history_path;
    int max_features = 10000;
    int min_df = 1;
    double max_df = 1.0;
    std::uint64_t seed = 0;
    nlohmann::json hyper = nlohmann::json::object();
    // CNN shape
    int embed_dim = 32, filters = 64, kernel = 3, max_len = 40;
    int epochs = 0;             // 0 = per-kind default
    double learning_rate = 0.0; // 0 = per-kind default
    int batch_size = -1;        // -1 = per-kind default
};

inline int do_train(const TrainOptions& opt) {
    const ModelKind kind = parse_model_kind(opt.model_kind);
    const auto docs = load_corpus(opt.input, parse_format(opt.format));
    const auto tok = tokenize_corpus(docs);
    std::vector<Label> y;
    y.reserve(tok.size());
    for (const auto& d : tok) y.push_back(d.label);

    TfidfConfig tfidf_config{opt.min_df, opt.max_df, opt.max_features};
    const TfidfModel tfidf = TfidfModel::fit(tok, tfidf_config);

    TrainedClassifier tc;
    if (kind == ModelKind::cnn) {
        const auto batch = tfidf.encode_sequences(tok, opt.max_len);
        CnnTrainConfig cfg;
        cfg.model.embed_dim = opt.embed_dim;
        cfg.model.filters = opt.filters;
        cfg.model.kernel = opt.kernel;
        cfg.model.max_len = opt.max_len;
        cfg.model.seed = opt.seed;
        cfg.vocab_size = static_cast<int>(tfidf.vocab_size());
        if (opt.epochs > 0) cfg.epochs = opt.epochs;
        if (opt.learning_rate > 0.0) cfg.learning_rate = opt.learning_rate;
        if (opt.batch_size >= 0) cfg.batch_size = opt.batch_size;
        auto [model, history] = train_cnn(batch, y, cfg);
        if (!opt.history_path.empty()) {
            std::ofstream hist(opt.history_path);
            if (!hist) throw IoError("cannot write history file: " + opt.history_path);
            hist << history.to_csv();
        }
        tc.kind = ModelKind::cnn;
        tc.tfidf = tfidf;
        tc.max_len = opt.max_len;
        tc.model = std::move(model);
    } else {
        nlohmann::json hp = opt.hyper;
        if (opt.epochs > 0) hp["max_epochs"] = opt.epochs;
        if (opt.learning_rate > 0.0) hp["learning_rate"] = opt.learning_rate;
        if (opt.batch_size >= 0) hp["batch_size"] = opt.batch_size;
        const auto X = tfidf.transform_all(tok);
        tc = train_classical_model(kind, X, y, tfidf, opt.seed, hp);
    }
    save_model(tc, opt.output);
    std::cout << "trained " << opt.model_kind << " on " << docs.size() << " documents ("
              << tfidf.vocab_size() << " features) -> " << opt.output << '\n';
    return 0;
}

inline int do_evaluate(const std::string& model_path, const std::string& input,
                       const std::string& format, bool as_json) {
    const TrainedClassifier tc = load_model(model_path);
    const auto docs = load_corpus(input, parse_format(format));
    const auto tok = tokenize_corpus(docs);
    std::vector<Label> y_true;
    for (const auto& d : tok) y_true.push_back(d.label);
    const auto y_pred = tc.predict_docs(tok);
    const MetricsReport rep = weighted_report(confusion(y_true, y_pred));
    if (as_json) {
        std::cout << report_json(rep).dump(2) << '\n';
    } else {
        std::cout << "accuracy  " << format_percent(rep.accuracy) << '\n'
                  << "precision " << format_percent(rep.weighted_precision) << '\n'
                  << "recall    " << format_percent(rep.weighted_recall) << '\n'
                  << "f_score   " << format_percent(rep.weighted_f1) << '\n';
    }
    return 0;
}

} // namespace detail

/// Entry point behind main(). Exit codes: 0 success, 1 operational error,
/// 2 usage error.
inline int run(int argc, const char* const* argv) {
    CLI::App app{"emoforge: three-class tweet emotion classification toolkit"};
    app.require_subcommand(1);
    int exit_code = 0;

    // ingest ---------------------------------------------------------------
    auto* ingest = app.add_subcommand("ingest", "Load a corpus and print its class summary");
    auto ingest_input = std::make_shared<std::string>();
    auto ingest_format = std::make_shared<std::string>("csv");
    ingest->add_option("--input", *ingest_input, "corpus CSV/TSV file")->required();
    ingest->add_option("--format", *ingest_format, "csv or tsv")
        ->check(CLI::IsMember({"csv", "tsv"}));
    ingest->callback([=] {
        const auto docs = load_corpus(*ingest_input, detail::parse_format(*ingest_format));
        std::cout << distribution_json(class_distribution(docs)).dump(2) << '\n';
    });

    // split ----------------------------------------------------------------
    auto* split_cmd = app.add_subcommand("split", "Stratified train/test split");
    auto split_input = std::make_shared<std::string>();
    auto split_format = std::make_shared<std::string>("csv");
    auto split_fraction = std::make_shared<double>(0.7);
    auto split_seed = std::make_shared<std::uint64_t>(42);
    auto split_out = std::make_shared<std::string>(".");
    split_cmd->add_option("--input", *split_input, "corpus CSV/TSV file")->required();
    split_cmd->add_option("--format", *split_format)->check(CLI::IsMember({"csv", "tsv"}));
    split_cmd->add_option("--train-fraction", *split_fraction, "train share in (0,1)");
    split_cmd->add_option("--seed", *split_seed, "shuffle seed");
    split_cmd->add_option("--out", *split_out, "output directory for train.csv/test.csv");
    split_cmd->callback([=] {
        const auto docs = load_corpus(*split_input, detail::parse_format(*split_format));
        const auto split = stratified_split(docs, *split_fraction, *split_seed);
        std::filesystem::create_directories(*split_out);
        const auto train_path = std::filesystem::path(*split_out) / "train.csv";
        const auto test_path = std::filesystem::path(*split_out) / "test.csv";
        write_corpus(split.train, train_path);
        write_corpus(split.test, test_path);
        std::cout << "train " << split.train.size() << " -> " << train_path.string() << '\n'
                  << "test  " << split.test.size() << " -> " << test_path.string() << '\n';
    });

    // train ------------------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "Fit a vectorizer and train one classifier");
    auto topt = std::make_shared<detail::TrainOptions>();
    train_cmd->add_option("--model", topt->model_kind, "classifier kind")
        ->required()
        ->check(CLI::IsMember({"logreg", "svm-linear", "svm-rbf", "dtree", "adaboost",
                               "rforest", "cnn"}));
    train_cmd->add_option("--input", topt->input, "training corpus (default train.csv)");
    train_cmd->add_option("--format", topt->format)->check(CLI::IsMember({"csv", "tsv"}));
    train_cmd->add_option("--out", topt->output, "model file to write");
    train_cmd->add_option("--max-features", topt->max_features, "vocabulary cap");
    train_cmd->add_option("--min-df", topt->min_df);
    train_cmd->add_option("--max-df", topt->max_df);
    train_cmd->add_option("--seed", topt->seed);
    train_cmd->add_option("--epochs", topt->epochs, "training epochs / max epochs");
    train_cmd->add_option("--learning-rate", topt->learning_rate);
    train_cmd->add_option("--batch-size", topt->batch_size);
    auto l2 = std::make_shared<double>(-1.0);
    auto tol = std::make_shared<double>(-1.0);
    auto gamma = std::make_shared<double>(-1.0);
    auto c_reg = std::make_shared<double>(-1.0);
    auto sample_cap = std::make_shared<std::int64_t>(-1);
    auto n_trees = std::make_shared<int>(-1);
    auto max_depth = std::make_shared<int>(-2);
    auto n_stages = std::make_shared<int>(-1);
    auto base_depth = std::make_shared<int>(-1);
    train_cmd->add_option("--l2", *l2, "L2 strength (linear models)");
    train_cmd->add_option("--tolerance", *tol);
    train_cmd->add_option("--gamma", *gamma, "RBF kernel width");
    train_cmd->add_option("--c-reg", *c_reg, "RBF box constraint");
    train_cmd->add_option("--sample-cap", *sample_cap, "RBF sample cap");
    train_cmd->add_option("--n-trees", *n_trees, "forest size");
    train_cmd->add_option("--max-depth", *max_depth, "tree depth cap (-1 unbounded)");
    train_cmd->add_option("--n-stages", *n_stages, "boosting stages");
    train_cmd->add_option("--base-depth", *base_depth, "boosting base tree depth");
    train_cmd->add_option("--embed-dim", topt->embed_dim, "CNN embedding width");
    train_cmd->add_option("--filters", topt->filters, "CNN filter count");
    train_cmd->add_option("--kernel", topt->kernel, "CNN kernel width");
    train_cmd->add_option("--max-len", topt->max_len, "CNN sequence length");
    train_cmd->add_option("--history", topt->history_path, "CNN history CSV path");
    train_cmd->callback([=, &exit_code] {
        if (*l2 >= 0.0) topt->hyper["l2"] = *l2;
        if (*tol >= 0.0) topt->hyper["tolerance"] = *tol;
        if (*gamma >= 0.0) topt->hyper["gamma"] = *gamma;
        if (*c_reg >= 0.0) topt->hyper["c_reg"] = *c_reg;
        if (*sample_cap >= 0) topt->hyper["sample_cap"] = *sample_cap;
        if (*n_trees >= 0) topt->hyper["n_trees"] = *n_trees;
        if (*max_depth >= -1) topt->hyper["max_depth"] = *max_depth;
        if (*n_stages >= 0) topt->hyper["n_stages"] = *n_stages;
        if (*base_depth >= 0) topt->hyper["base_depth"] = *base_depth;
        exit_code = detail::do_train(*topt);
    });

    // evaluate ---------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a saved model on a labeled corpus");
    auto eval_model = std::make_shared<std::string>("model.json");
    auto eval_input = std::make_shared<std::string>("test.csv");
    auto eval_format = std::make_shared<std::string>("csv");
    auto eval_json = std::make_shared<bool>(false);
    eval_cmd->add_option("--model", *eval_model, "model file");
    eval_cmd->add_option("--input", *eval_input, "labeled corpus");
    eval_cmd->add_option("--format", *eval_format)->check(CLI::IsMember({"csv", "tsv"}));
    eval_cmd->add_flag("--json", *eval_json, "emit the full-precision JSON report");
    eval_cmd->callback([=, &exit_code] {
        exit_code = detail::do_evaluate(*eval_model, *eval_input, *eval_format, *eval_json);
    });

    // predict ------------------------------------------------------------------
    auto* predict_cmd = app.add_subcommand("predict", "Classify raw text");
    auto predict_model = std::make_shared<std::string>("model.json");
    auto predict_text = std::make_shared<std::string>();
    auto predict_input = std::make_shared<std::string>();
    predict_cmd->add_option("--model", *predict_model, "model file");
    auto* text_opt = predict_cmd->add_option("--text", *predict_text, "one text to classify");
    auto* input_opt =
        predict_cmd->add_option("--input", *predict_input, "file with one text per line");
    text_opt->excludes(input_opt);
    predict_cmd->callback([=] {
        const TrainedClassifier tc = load_model(*predict_model);
        if (!predict_text->empty()) {
            std::cout << label_name(tc.predict_text(*predict_text)) << '\n';
        } else if (!predict_input->empty()) {
            std::ifstream in(*predict_input);
            if (!in) throw IoError("cannot open input file: " + *predict_input);
            std::string line;
            while (std::getline(in, line)) {
                std::cout << label_name(tc.predict_text(line)) << '\n';
            }
        } else {
            throw ConfigError("predict needs --text or --input");
        }
    });

    // grid ------------------------------------------------------------------
    auto* grid_cmd = app.add_subcommand("grid", "Run the feature-sweep experiment grid");
    auto grid_config_path = std::make_shared<std::string>();
    auto grid_out = std::make_shared<std::string>();
    auto grid_jobs = std::make_shared<int>(0);
    auto grid_seed = std::make_shared<std::int64_t>(-1);
    grid_cmd->add_option("--config", *grid_config_path, "grid config JSON")->required();
    grid_cmd->add_option("--out", *grid_out, "output directory (overrides config)");
    grid_cmd->add_option("--jobs", *grid_jobs, "concurrent cells (overrides config)");
    grid_cmd->add_option("--seed", *grid_seed, "seed (overrides config)");
    grid_cmd->callback([=, &exit_code] {
        ExperimentConfig cfg = load_experiment_config(*grid_config_path);
        if (!grid_out->empty()) cfg.out_dir = *grid_out;
        if (*grid_jobs > 0) cfg.jobs = *grid_jobs;
        if (*grid_seed >= 0) cfg.seed = static_cast<std::uint64_t>(*grid_seed);
        const GridResult result = run_grid(cfg);
        std::cout << grid_table(result);
        if (!result.all_ok()) {
            std::cerr << "grid finished with failed cells\n";
            exit_code = 1;
        }
    });

    // tagcloud ------------------------------------------------------------------
    auto* cloud_cmd = app.add_subcommand("tagcloud", "Per-label word-frequency cloud");
    auto cloud_input = std::make_shared<std::string>();
    auto cloud_format = std::make_shared<std::string>("csv");
    auto cloud_label = std::make_shared<std::string>();
    auto cloud_params = std::make_shared<CloudParams>();
    auto cloud_exclude = std::make_shared<std::vector<std::string>>();
    auto cloud_html = std::make_shared<std::string>();
    cloud_cmd->add_option("--input", *cloud_input, "labeled corpus")->required();
    cloud_cmd->add_option("--format", *cloud_format)->check(CLI::IsMember({"csv", "tsv"}));
    cloud_cmd->add_option("--label", *cloud_label, "positive, negative or neutral")->required();
    cloud_cmd->add_option("--max-words", cloud_params->max_words);
    cloud_cmd->add_option("--min-freq", cloud_params->min_freq);
    cloud_cmd->add_option("--exclude", *cloud_exclude, "words to hide (repeatable)");
    cloud_cmd->add_flag("--group-similar", cloud_params->group_similar,
                        "merge words sharing a stem");
    cloud_cmd->add_option("--html", *cloud_html, "write a self-contained HTML page here");
    cloud_cmd->callback([=] {
        const Label label = parse_label(*cloud_label);
        const auto docs = load_corpus(*cloud_input, detail::parse_format(*cloud_format));
        std::vector<TokenizedDocument> filtered;
        for (const auto& d : docs) {
            if (d.label == label) filtered.push_back(tokenize_document(d));
        }
        CloudParams params = *cloud_params;
        params.exclude.insert(cloud_exclude->begin(), cloud_exclude->end());
        const auto entries = build_cloud(filtered, params);
        if (!cloud_html->empty()) {
            std::ofstream out(*cloud_html);
            if (!out) throw IoError("cannot write HTML file: " + *cloud_html);
            out << render_cloud(entries, CloudFormat::html);
        } else {
            std::cout << render_cloud(entries, CloudFormat::text) << '\n';
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the usage message on the error stream
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_code;
}

/// Convenience overload for in-process tests.
inline int run(const std::vector<std::string>& args) {
    std::vector<std::string> full;
    full.reserve(args.size() + 1);
    full.push_back("emoforge");
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(full.size());
    for (const auto& a : full) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

} // namespace emoforge::cli

#endif // EMOFORGE_CLI_HPP
