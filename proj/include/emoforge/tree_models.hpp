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

#ifndef EMOFORGE_TREE_MODELS_HPP
#define EMOFORGE_TREE_MODELS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "emoforge/errors.hpp"
#include "emoforge/label.hpp"
#include "emoforge/linear_models.hpp" // argmax_label, detail::resolve_width
#include "emoforge/rng.hpp"
#include "emoforge/sparse.hpp"

namespace emoforge {

struct TreeConfig {
    int max_depth = -1;       // < 0 means unbounded
    int min_samples_leaf = 1;
    int n_features = 0;       // 0 = infer from the data
};

/// CART classifier stored as a flat node arena; children referenced by
/// index, -1 marking leaves. Sparse inputs read absent features as 0.
struct DecisionTree {
    struct Node {
        std::int32_t feature = -1;
        double threshold = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::array<double, kNumLabels> counts{}; // weighted class counts at the node
        Label label = Label::positive;

        bool is_leaf() const { return left < 0; }
    };

    std::vector<Node> nodes;
    int n_features = 0;

    Label predict(const SparseVector& v) const {
        std::int32_t at = 0;
        while (!nodes[static_cast<std::size_t>(at)].is_leaf()) {
            const Node& node = nodes[static_cast<std::size_t>(at)];
            at = v.at(static_cast<std::uint32_t>(node.feature)) <= node.threshold
                ? node.left
                : node.right;
        }
        return nodes[static_cast<std::size_t>(at)].label;
    }

    const Node& root() const { return nodes.front(); }
};

struct ForestConfig {
    int n_trees = 100;
    int max_depth = -1;
    int min_samples_leaf = 1;
    std::uint64_t seed = 0;
    bool bootstrap = true;
    bool feature_subsample = true; // ceil(sqrt(V)) random features per split
    int n_features = 0;
};

struct Forest {
    std::vector<DecisionTree> trees;
    std::vector<std::uint64_t> tree_seeds;
    int n_features = 0;

    /// Plurality vote, ties to the lowest class code.
    Label predict(const SparseVector& v) const {
        std::array<double, kNumLabels> votes{};
        for (const auto& t : trees) ++votes[static_cast<std::size_t>(label_code(t.predict(v)))];
        return argmax_label(votes);
    }
};

struct BoostConfig {
    int n_stages = 50;
    int base_depth = 1; // depth-1 stumps by default
    int min_samples_leaf = 1;
    int n_features = 0;
};

struct BoostEnsemble {
    struct Stage {
        DecisionTree tree;
        double alpha = 0.0;
    };
    std::vector<Stage> stages;
    int n_classes = kNumLabels; // classes present at fit time; sets the SAMME ln(C-1) term
    int n_features = 0;

    Label predict(const SparseVector& v) const {
        std::array<double, kNumLabels> scores{};
        for (const auto& s : stages) {
            scores[static_cast<std::size_t>(label_code(s.tree.predict(v)))] += s.alpha;
        }
        return argmax_label(scores);
    }
};

namespace detail {

inline double gini_of(const std::array<double, kNumLabels>& counts, double weight) {
    double g = 1.0;
    for (int c = 0; c < kNumLabels; ++c) {
        const double p = counts[static_cast<std::size_t>(c)] / weight;
        g -= p * p;
    }
    return g;
}

struct BestSplit {
    bool found = false;
    std::uint32_t feature = 0;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();
};

/// Greedy CART builder over a row multiset (rows may repeat for bootstrap
/// samples). Split score = left_weight*gini(left) + right_weight*gini(right);
/// candidate thresholds are midpoints between consecutive distinct observed
/// values; ties resolved by lowest feature index then lowest threshold via
/// strict comparison in ascending scan order.
class TreeBuilder {
public:
    TreeBuilder(std::span<const SparseVector> X, std::span<const Label> y,
                std::span<const double> weights, const TreeConfig& config,
                Rng* feature_rng = nullptr, int subset_size = 0)
        : x_(X), y_(y), weights_(weights), config_(config),
          feature_rng_(feature_rng), subset_size_(subset_size) {}

    DecisionTree build(std::vector<std::uint32_t> rows, int n_features) {
        DecisionTree tree;
        tree.n_features = n_features;
        n_features_ = n_features;
        nodes_ = &tree.nodes;
        grow(std::move(rows), 0);
        return tree;
    }

private:
    std::int32_t grow(std::vector<std::uint32_t> rows, int depth) {
        std::array<double, kNumLabels> counts{};
        for (auto r : rows) counts[static_cast<std::size_t>(label_code(y_[r]))] += w(r);

        const auto index = static_cast<std::int32_t>(nodes_->size());
        nodes_->push_back({});
        (*nodes_)[static_cast<std::size_t>(index)].counts = counts;
        (*nodes_)[static_cast<std::size_t>(index)].label = argmax_label(counts);

        int n_present = 0;
        for (double c : counts) n_present += c > 0.0 ? 1 : 0;
        const bool depth_ok = config_.max_depth < 0 || depth < config_.max_depth;
        if (n_present <= 1 || !depth_ok ||
            rows.size() < 2 * static_cast<std::size_t>(config_.min_samples_leaf)) {
            return index;
        }

        const BestSplit best = search_split(rows);
        if (!best.found) return index;

        std::vector<std::uint32_t> left, right;
        for (auto r : rows) {
            (x_[r].at(best.feature) <= best.threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const std::int32_t left_index = grow(std::move(left), depth + 1);
        const std::int32_t right_index = grow(std::move(right), depth + 1);
        auto& node = (*nodes_)[static_cast<std::size_t>(index)];
        node.feature = static_cast<std::int32_t>(best.feature);
        node.threshold = best.threshold;
        node.left = left_index;
        node.right = right_index;
        return index;
    }

    BestSplit search_split(const std::vector<std::uint32_t>& rows) {
        BestSplit best;
        auto consider = [&](std::uint32_t feature) {
            gather_.clear();
            for (auto r : rows) gather_.push_back({x_[r].at(feature), r});
            std::sort(gather_.begin(), gather_.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (gather_.front().first == gather_.back().first) return;

            std::array<double, kNumLabels> left{};
            std::array<double, kNumLabels> total{};
            double left_weight = 0.0, total_weight = 0.0;
            for (const auto& [value, r] : gather_) {
                total[static_cast<std::size_t>(label_code(y_[r]))] += w(r);
                total_weight += w(r);
            }
            for (std::size_t i = 0; i + 1 < gather_.size(); ++i) {
                const auto r = gather_[i].second;
                left[static_cast<std::size_t>(label_code(y_[r]))] += w(r);
                left_weight += w(r);
                if (gather_[i].first == gather_[i + 1].first) continue;
                const auto n_left = i + 1;
                const auto n_right = gather_.size() - n_left;
                if (n_left < static_cast<std::size_t>(config_.min_samples_leaf) ||
                    n_right < static_cast<std::size_t>(config_.min_samples_leaf)) {
                    continue;
                }
                std::array<double, kNumLabels> right{};
                for (int c = 0; c < kNumLabels; ++c) {
                    right[static_cast<std::size_t>(c)] =
                        total[static_cast<std::size_t>(c)] - left[static_cast<std::size_t>(c)];
                }
                const double right_weight = total_weight - left_weight;
                const double score = left_weight * gini_of(left, left_weight) +
                                     right_weight * gini_of(right, right_weight);
                if (score < best.score) {
                    best.found = true;
                    best.feature = feature;
                    best.threshold = 0.5 * (gather_[i].first + gather_[i + 1].first);
                    best.score = score;
                }
            }
        };

        if (subset_size_ > 0 && feature_rng_ != nullptr &&
            subset_size_ < n_features_) {
            candidates_.clear();
            while (candidates_.size() < static_cast<std::size_t>(subset_size_)) {
                const auto f = static_cast<std::uint32_t>(
                    feature_rng_->below(static_cast<std::uint64_t>(n_features_)));
                if (std::find(candidates_.begin(), candidates_.end(), f) == candidates_.end()) {
                    candidates_.push_back(f);
                }
            }
            std::sort(candidates_.begin(), candidates_.end());
            for (auto f : candidates_) consider(f);
        } else {
            for (std::uint32_t f = 0; f < static_cast<std::uint32_t>(n_features_); ++f) {
                consider(f);
            }
        }
        return best;
    }

    double w(std::uint32_t row) const { return weights_.empty() ? 1.0 : weights_[row]; }

    std::span<const SparseVector> x_;
    std::span<const Label> y_;
    std::span<const double> weights_;
    TreeConfig config_;
    Rng* feature_rng_;
    int subset_size_;
    int n_features_ = 0;
    std::vector<DecisionTree::Node>* nodes_ = nullptr;
    std::vector<std::pair<double, std::uint32_t>> gather_;
    std::vector<std::uint32_t> candidates_;
};

inline std::vector<std::uint32_t> all_rows(std::size_t n) {
    std::vector<std::uint32_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0u);
    return rows;
}

} // namespace detail

/// Plain CART with Gini impurity; optional per-sample weights (used by
/// AdaBoost) default to 1.
inline DecisionTree train_decision_tree(std::span<const SparseVector> X,
                                        std::span<const Label> y,
                                        const TreeConfig& config = {},
                                        std::span<const double> sample_weights = {}) {
    detail::check_train_input(X, y);
    const int V = detail::resolve_width(X, config.n_features);
    detail::TreeBuilder builder(X, y, sample_weights, config);
    return builder.build(detail::all_rows(X.size()), V);
}

/// Seeded bagging: each tree trains on N bootstrap draws and, when feature
/// subsampling is on, examines ceil(sqrt(V)) random features per split.
inline Forest train_random_forest(std::span<const SparseVector> X, std::span<const Label> y,
                                  const ForestConfig& config = {}) {
    detail::check_train_input(X, y);
    if (config.n_trees < 1) throw ConfigError("n_trees must be >= 1");
    const int V = detail::resolve_width(X, config.n_features);
    const int subset = config.feature_subsample
        ? std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(V)))))
        : 0;

    Forest forest;
    forest.n_features = V;
    TreeConfig tree_config;
    tree_config.max_depth = config.max_depth;
    tree_config.min_samples_leaf = config.min_samples_leaf;
    tree_config.n_features = V;
    const std::size_t n = X.size();
    for (int t = 0; t < config.n_trees; ++t) {
        const std::uint64_t tree_seed = mix_seed(config.seed, static_cast<std::uint64_t>(t));
        forest.tree_seeds.push_back(tree_seed);
        Rng rng(tree_seed);
        std::vector<std::uint32_t> rows;
        if (config.bootstrap) {
            rows.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                rows.push_back(static_cast<std::uint32_t>(rng.below(n)));
            }
        } else {
            rows = detail::all_rows(n);
        }
        detail::TreeBuilder builder(X, y, {}, tree_config, subset > 0 ? &rng : nullptr, subset);
        forest.trees.push_back(builder.build(std::move(rows), V));
    }
    return forest;
}

/// Multiclass AdaBoost (SAMME) over depth-limited trees. Stage weight
/// alpha = ln((1-eps)/eps) + ln(C-1) with C the number of classes present.
/// A perfect stage is kept (eps clamped to keep alpha finite) and boosting
/// stops; a stage no better than chance stops boosting, or raises if it is
/// the first.
inline BoostEnsemble train_adaboost(std::span<const SparseVector> X, std::span<const Label> y,
                                    const BoostConfig& config = {}) {
    detail::check_train_input(X, y);
    if (config.n_stages < 1) throw ConfigError("n_stages must be >= 1");
    const int V = detail::resolve_width(X, config.n_features);
    const int n_classes = std::max(2, detail::count_classes(y));
    const double chance = 1.0 - 1.0 / static_cast<double>(n_classes);

    const std::size_t n = X.size();
    std::vector<double> weights(n, 1.0 / static_cast<double>(n));
    TreeConfig tree_config;
    tree_config.max_depth = config.base_depth;
    tree_config.min_samples_leaf = config.min_samples_leaf;
    tree_config.n_features = V;

    BoostEnsemble ensemble;
    ensemble.n_classes = n_classes;
    ensemble.n_features = V;
    for (int stage = 0; stage < config.n_stages; ++stage) {
        detail::TreeBuilder builder(X, y, weights, tree_config);
        DecisionTree tree = builder.build(detail::all_rows(n), V);

        std::vector<bool> miss(n);
        double eps = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            miss[i] = tree.predict(X[i]) != y[i];
            if (miss[i]) eps += weights[i];
        }

        if (eps >= chance) {
            if (stage == 0) {
                throw BoostError("first boosting stage is no better than chance (error " +
                                 std::to_string(eps) + " >= " + std::to_string(chance) + ")");
            }
            break; // reject the stage, stop boosting
        }

        const double eps_clamped = std::max(eps, 1e-10);
        const double alpha = std::log((1.0 - eps_clamped) / eps_clamped) +
                             std::log(static_cast<double>(n_classes - 1));
        ensemble.stages.push_back({std::move(tree), alpha});
        if (eps == 0.0) break; // perfect stage: keep it and stop

        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (miss[i]) weights[i] *= std::exp(alpha);
            z += weights[i];
        }
        for (auto& w : weights) w /= z;
    }
    return ensemble;
}

} // namespace emoforge

#endif // EMOFORGE_TREE_MODELS_HPP
