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

#ifndef EMOFORGE_MODEL_IO_HPP
#define EMOFORGE_MODEL_IO_HPP

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "emoforge/errors.hpp"
#include "emoforge/linear_models.hpp"
#include "emoforge/neural.hpp"
#include "emoforge/textprep.hpp"
#include "emoforge/tree_models.hpp"
#include "emoforge/vectorizer.hpp"

namespace emoforge {

enum class ModelKind { logreg, svm_linear, svm_rbf, dtree, adaboost, rforest, cnn };

inline const char* model_kind_name(ModelKind k) {
    switch (k) {
    case ModelKind::logreg: return "logreg";
    case ModelKind::svm_linear: return "svm-linear";
    case ModelKind::svm_rbf: return "svm-rbf";
    case ModelKind::dtree: return "dtree";
    case ModelKind::adaboost: return "adaboost";
    case ModelKind::rforest: return "rforest";
    case ModelKind::cnn: return "cnn";
    }
    return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
    if (s == "logreg") return ModelKind::logreg;
    if (s == "svm-linear") return ModelKind::svm_linear;
    if (s == "svm-rbf") return ModelKind::svm_rbf;
    if (s == "dtree") return ModelKind::dtree;
    if (s == "adaboost") return ModelKind::adaboost;
    if (s == "rforest") return ModelKind::rforest;
    if (s == "cnn") return ModelKind::cnn;
    throw FormatError("unknown model kind \"" + std::string(s) + "\"");
}

/// A complete prediction pipeline: the fitted vectorizer plus one trained
/// classifier. This is what model files on disk contain.
struct TrainedClassifier {
    ModelKind kind = ModelKind::logreg;
    TfidfModel tfidf;
    int max_len = 0; // sequence length; CNN only
    std::variant<LinearModel, KernelSvmModel, DecisionTree, Forest, BoostEnsemble, CnnModel>
        model;

    Label predict_tokens(std::span<const Token> tokens) const {
        if (kind == ModelKind::cnn) {
            const auto& cnn = std::get<CnnModel>(model);
            SequenceBatch batch;
            batch.rows = 1;
            batch.max_len = cnn.max_len;
            batch.codes = tfidf.encode_sequence(tokens, cnn.max_len);
            return cnn_predict(cnn, batch).front();
        }
        const SparseVector v = tfidf.transform(tokens);
        switch (kind) {
        case ModelKind::logreg:
        case ModelKind::svm_linear:
            return predict_one(std::get<LinearModel>(model), v);
        case ModelKind::svm_rbf:
            return predict_one(std::get<KernelSvmModel>(model), v);
        case ModelKind::dtree:
            return std::get<DecisionTree>(model).predict(v);
        case ModelKind::adaboost:
            return std::get<BoostEnsemble>(model).predict(v);
        case ModelKind::rforest:
            return std::get<Forest>(model).predict(v);
        default:
            throw FormatError("unhandled model kind");
        }
    }

    Label predict_text(std::string_view raw) const {
        const auto tokens = tokenize(normalize(raw));
        return predict_tokens(tokens);
    }

    std::vector<Label> predict_docs(std::span<const TokenizedDocument> docs) const {
        std::vector<Label> out;
        out.reserve(docs.size());
        for (const auto& d : docs) out.push_back(predict_tokens(d.tokens));
        return out;
    }
};

namespace detail {

inline nlohmann::json tree_node_json(const DecisionTree& tree, std::int32_t index) {
    const auto& node = tree.nodes[static_cast<std::size_t>(index)];
    nlohmann::json counts = nlohmann::json::array();
    for (double c : node.counts) counts.push_back(c);
    if (node.is_leaf()) {
        return nlohmann::json{{"leaf", true},
                              {"counts", std::move(counts)},
                              {"label", label_code(node.label)}};
    }
    return nlohmann::json{{"leaf", false},
                          {"feature", node.feature},
                          {"threshold", node.threshold},
                          {"counts", std::move(counts)},
                          {"label", label_code(node.label)},
                          {"left", tree_node_json(tree, node.left)},
                          {"right", tree_node_json(tree, node.right)}};
}

inline std::int32_t tree_node_from_json(const nlohmann::json& j, DecisionTree& tree) {
    const auto index = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.push_back({});
    {
        auto& node = tree.nodes.back();
        const auto& counts = j.at("counts");
        for (int c = 0; c < kNumLabels; ++c) {
            node.counts[static_cast<std::size_t>(c)] = counts.at(static_cast<std::size_t>(c)).get<double>();
        }
        node.label = label_from_code(j.at("label").get<int>());
    }
    if (!j.at("leaf").get<bool>()) {
        const double threshold = j.at("threshold").get<double>();
        const auto feature = j.at("feature").get<std::int32_t>();
        const auto left = tree_node_from_json(j.at("left"), tree);
        const auto right = tree_node_from_json(j.at("right"), tree);
        auto& node = tree.nodes[static_cast<std::size_t>(index)];
        node.feature = feature;
        node.threshold = threshold;
        node.left = left;
        node.right = right;
    }
    return index;
}

inline nlohmann::json sparse_json(const SparseVector& v) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [i, w] : v.entries) out.push_back({i, w});
    return out;
}

inline SparseVector sparse_from_json(const nlohmann::json& j) {
    SparseVector v;
    for (const auto& pair : j) {
        v.entries.emplace_back(pair.at(0).get<std::uint32_t>(), pair.at(1).get<double>());
    }
    return v;
}

inline nlohmann::json linear_json(const LinearModel& m) {
    return nlohmann::json{
        {"linear_kind", m.kind == LinearKind::logistic ? "logistic" : "linear_svm"},
        {"n_features", m.n_features},
        {"weights", m.weights},
        {"bias", m.bias},
    };
}

inline LinearModel linear_from_json(const nlohmann::json& j) {
    LinearModel m;
    m.kind = j.at("linear_kind").get<std::string>() == "logistic" ? LinearKind::logistic
                                                                  : LinearKind::linear_svm;
    m.n_features = j.at("n_features").get<int>();
    m.weights = j.at("weights").get<std::vector<double>>();
    const auto& bias = j.at("bias");
    for (int c = 0; c < kNumLabels; ++c) m.bias[static_cast<std::size_t>(c)] = bias.at(static_cast<std::size_t>(c)).get<double>();
    return m;
}

inline nlohmann::json kernel_svm_json(const KernelSvmModel& m) {
    nlohmann::json svs = nlohmann::json::array();
    for (const auto& sv : m.support_vectors) svs.push_back(sparse_json(sv));
    nlohmann::json coef = nlohmann::json::array();
    for (const auto& c : m.dual_coef) coef.push_back(c);
    return nlohmann::json{
        {"gamma", m.gamma},       {"c_reg", m.c_reg},
        {"n_features", m.n_features}, {"support_vectors", std::move(svs)},
        {"dual_coef", std::move(coef)}, {"bias", m.bias},
    };
}

inline KernelSvmModel kernel_svm_from_json(const nlohmann::json& j) {
    KernelSvmModel m;
    m.gamma = j.at("gamma").get<double>();
    m.c_reg = j.at("c_reg").get<double>();
    m.n_features = j.at("n_features").get<int>();
    for (const auto& sv : j.at("support_vectors")) {
        m.support_vectors.push_back(sparse_from_json(sv));
    }
    const auto& coef = j.at("dual_coef");
    const auto& bias = j.at("bias");
    for (int c = 0; c < kNumLabels; ++c) {
        m.dual_coef[static_cast<std::size_t>(c)] = coef.at(static_cast<std::size_t>(c)).get<std::vector<double>>();
        m.bias[static_cast<std::size_t>(c)] = bias.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

inline nlohmann::json tree_json(const DecisionTree& t) {
    return nlohmann::json{{"n_features", t.n_features}, {"root", tree_node_json(t, 0)}};
}

inline DecisionTree tree_from_json(const nlohmann::json& j) {
    DecisionTree t;
    t.n_features = j.at("n_features").get<int>();
    tree_node_from_json(j.at("root"), t);
    return t;
}

inline nlohmann::json forest_json(const Forest& f) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : f.trees) trees.push_back(tree_json(t));
    return nlohmann::json{{"n_features", f.n_features},
                          {"tree_seeds", f.tree_seeds},
                          {"trees", std::move(trees)}};
}

inline Forest forest_from_json(const nlohmann::json& j) {
    Forest f;
    f.n_features = j.at("n_features").get<int>();
    f.tree_seeds = j.at("tree_seeds").get<std::vector<std::uint64_t>>();
    for (const auto& t : j.at("trees")) f.trees.push_back(tree_from_json(t));
    return f;
}

inline nlohmann::json boost_json(const BoostEnsemble& b) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : b.stages) {
        stages.push_back({{"alpha", s.alpha}, {"tree", tree_json(s.tree)}});
    }
    return nlohmann::json{{"n_features", b.n_features},
                          {"n_classes", b.n_classes},
                          {"stages", std::move(stages)}};
}

inline BoostEnsemble boost_from_json(const nlohmann::json& j) {
    BoostEnsemble b;
    b.n_features = j.at("n_features").get<int>();
    b.n_classes = j.at("n_classes").get<int>();
    for (const auto& s : j.at("stages")) {
        b.stages.push_back({tree_from_json(s.at("tree")), s.at("alpha").get<double>()});
    }
    return b;
}

inline nlohmann::json cnn_json(const CnnModel& m) {
    return nlohmann::json{
        {"vocab_size", m.vocab_size}, {"embed_dim", m.embed_dim},
        {"filters", m.filters},       {"kernel", m.kernel},
        {"max_len", m.max_len},       {"seed", m.seed},
        {"embedding", m.embedding},   {"conv_w", m.conv_w},
        {"conv_b", m.conv_b},         {"dense_w", m.dense_w},
        {"dense_b", m.dense_b},
    };
}

inline CnnModel cnn_from_json(const nlohmann::json& j) {
    CnnModel m;
    m.vocab_size = j.at("vocab_size").get<int>();
    m.embed_dim = j.at("embed_dim").get<int>();
    m.filters = j.at("filters").get<int>();
    m.kernel = j.at("kernel").get<int>();
    m.max_len = j.at("max_len").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.embedding = j.at("embedding").get<std::vector<double>>();
    m.conv_w = j.at("conv_w").get<std::vector<double>>();
    m.conv_b = j.at("conv_b").get<std::vector<double>>();
    m.dense_w = j.at("dense_w").get<std::vector<double>>();
    m.dense_b = j.at("dense_b").get<std::vector<double>>();
    return m;
}

} // namespace detail

inline constexpr int kModelFileVersion = 1;

inline nlohmann::json model_to_json(const TrainedClassifier& tc) {
    nlohmann::json j{
        {"format", "emoforge-model"},
        {"version", kModelFileVersion},
        {"kind", model_kind_name(tc.kind)},
        {"vectorizer", tc.tfidf.to_json()},
    };
    switch (tc.kind) {
    case ModelKind::logreg:
    case ModelKind::svm_linear:
        j["model"] = detail::linear_json(std::get<LinearModel>(tc.model));
        break;
    case ModelKind::svm_rbf:
        j["model"] = detail::kernel_svm_json(std::get<KernelSvmModel>(tc.model));
        break;
    case ModelKind::dtree:
        j["model"] = detail::tree_json(std::get<DecisionTree>(tc.model));
        break;
    case ModelKind::adaboost:
        j["model"] = detail::boost_json(std::get<BoostEnsemble>(tc.model));
        break;
    case ModelKind::rforest:
        j["model"] = detail::forest_json(std::get<Forest>(tc.model));
        break;
    case ModelKind::cnn:
        j["model"] = detail::cnn_json(std::get<CnnModel>(tc.model));
        j["max_len"] = tc.max_len;
        break;
    }
    return j;
}

inline TrainedClassifier model_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("format") || j.at("format") != "emoforge-model") {
        throw FormatError("not an emoforge model file");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFileVersion) {
        throw VersionError("unsupported model file version " + std::to_string(version) +
                           " (expected " + std::to_string(kModelFileVersion) + ")");
    }
    TrainedClassifier tc;
    tc.kind = parse_model_kind(j.at("kind").get<std::string>());
    tc.tfidf = TfidfModel::from_json(j.at("vectorizer"));
    const auto& m = j.at("model");
    switch (tc.kind) {
    case ModelKind::logreg:
    case ModelKind::svm_linear:
        tc.model = detail::linear_from_json(m);
        break;
    case ModelKind::svm_rbf:
        tc.model = detail::kernel_svm_from_json(m);
        break;
    case ModelKind::dtree:
        tc.model = detail::tree_from_json(m);
        break;
    case ModelKind::adaboost:
        tc.model = detail::boost_from_json(m);
        break;
    case ModelKind::rforest:
        tc.model = detail::forest_from_json(m);
        break;
    case ModelKind::cnn:
        tc.model = detail::cnn_from_json(m);
        tc.max_len = j.at("max_len").get<int>();
        break;
    }
    return tc;
}

inline void save_model(const TrainedClassifier& tc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + path.string());
    out << model_to_json(tc).dump(2) << '\n';
    if (!out) throw IoError("failed writing model file: " + path.string());
}

inline TrainedClassifier load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed model file " + path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

} // namespace emoforge

#endif // EMOFORGE_MODEL_IO_HPP
