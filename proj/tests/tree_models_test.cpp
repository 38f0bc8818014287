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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>

#include "emoforge/tree_models.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace emoforge;
using emoforge::testing::random_labels;
using emoforge::testing::sv;
using Catch::Approx;

namespace {

double train_accuracy(const DecisionTree& t, const std::vector<SparseVector>& X,
                      const std::vector<Label>& y) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < X.size(); ++i) hits += t.predict(X[i]) == y[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(X.size());
}

DecisionTree leaf_tree(Label label) {
    DecisionTree t;
    t.n_features = 1;
    DecisionTree::Node node;
    node.label = label;
    node.counts[static_cast<std::size_t>(label_code(label))] = 1.0;
    t.nodes.push_back(node);
    return t;
}

/// Random small dataset with integer-ish feature values so split scores are
/// exact and the oracle comparison is deterministic.
void small_dataset(Rng& rng, std::vector<SparseVector>& X, std::vector<Label>& y) {
    const auto n = 2 + rng.below(7);   // 2..8 samples
    const int width = static_cast<int>(1 + rng.below(3)); // 1..3 features
    X.clear();
    y.clear();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<std::uint32_t, double>> pairs;
        for (int f = 0; f < width; ++f) {
            if (rng.below(2) == 0) {
                pairs.emplace_back(static_cast<std::uint32_t>(f),
                                   static_cast<double>(rng.below(4)));
            }
        }
        X.push_back(make_sparse(std::move(pairs)));
        y.push_back(label_from_code(static_cast<int>(rng.below(3))));
    }
}

} // namespace

TEST_CASE("a pure dataset collapses to a single leaf") {
    const std::vector<SparseVector> X = {sv({{0, 1.0}}), sv({{1, 2.0}}), sv({})};
    const std::vector<Label> y(3, Label::neutral);
    const auto tree = train_decision_tree(X, y);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.root().is_leaf());
    CHECK(tree.root().label == Label::neutral);
}

TEST_CASE("the two-value feature splits at the midpoint") {
    const std::vector<SparseVector> X = {sv({}), sv({}), sv({{0, 1.0}}), sv({{0, 1.0}})};
    const std::vector<Label> y = {Label::positive, Label::positive, Label::negative,
                                  Label::negative};
    const auto tree = train_decision_tree(X, y);
    REQUIRE_FALSE(tree.root().is_leaf());
    CHECK(tree.root().feature == 0);
    CHECK(tree.root().threshold == 0.5);
    CHECK(train_accuracy(tree, X, y) == 1.0);
    // Both children are pure leaves.
    CHECK(tree.nodes[static_cast<std::size_t>(tree.root().left)].is_leaf());
    CHECK(tree.nodes[static_cast<std::size_t>(tree.root().right)].is_leaf());
}

TEST_CASE("gini impurity of (2,2,0) is one half") {
    CHECK(emoforge::detail::gini_of({2.0, 2.0, 0.0}, 4.0) == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("the root split matches exhaustive search on small datasets") {
    Rng rng(2025);
    int compared = 0;
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<SparseVector> X;
        std::vector<Label> y;
        small_dataset(rng, X, y);
        const int width = 3;
        const auto oracle = emoforge::testing::exhaustive_best_split(X, y, width);
        TreeConfig cfg;
        cfg.n_features = width;
        const auto tree = train_decision_tree(X, y, cfg);
        if (!oracle.found) continue;
        // The tree may legitimately stop at a pure root.
        if (tree.root().is_leaf()) {
            std::set<Label> distinct(y.begin(), y.end());
            CHECK(distinct.size() == 1);
            continue;
        }
        ++compared;
        CHECK(tree.root().feature == static_cast<std::int32_t>(oracle.feature));
        CHECK(tree.root().threshold == oracle.threshold);
    }
    CHECK(compared > 100);
}

TEST_CASE("unbounded depth reaches full accuracy on consistent data") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<SparseVector> X;
        std::vector<Label> y;
        small_dataset(rng, X, y);
        // Force consistency: identical dense feature vectors get identical
        // labels (an explicit 0 entry and an absent entry are the same value).
        std::map<std::vector<double>, Label> canon;
        for (std::size_t i = 0; i < X.size(); ++i) {
            std::vector<double> dense(3, 0.0);
            for (const auto& [idx, w] : X[i].entries) dense[idx] = w;
            auto [it, inserted] = canon.emplace(std::move(dense), y[i]);
            if (!inserted) y[i] = it->second;
        }
        const auto tree = train_decision_tree(X, y);
        CHECK(train_accuracy(tree, X, y) == 1.0);
    }
}

TEST_CASE("max_depth 1 yields a stump") {
    const std::vector<SparseVector> X = {sv({}), sv({{0, 1.0}}), sv({{0, 2.0}}),
                                         sv({{0, 3.0}})};
    const std::vector<Label> y = {Label::positive, Label::negative, Label::neutral,
                                  Label::positive};
    TreeConfig cfg;
    cfg.max_depth = 1;
    const auto tree = train_decision_tree(X, y, cfg);
    CHECK(tree.nodes.size() <= 3);
    for (const auto& n : tree.nodes) {
        if (!n.is_leaf()) {
            CHECK(tree.nodes[static_cast<std::size_t>(n.left)].is_leaf());
            CHECK(tree.nodes[static_cast<std::size_t>(n.right)].is_leaf());
        }
    }
}

TEST_CASE("min_samples_leaf blocks splits that strand a sample") {
    const std::vector<SparseVector> X = {sv({}), sv({{0, 1.0}}), sv({{0, 1.0}}),
                                         sv({{0, 1.0}})};
    const std::vector<Label> y = {Label::positive, Label::negative, Label::negative,
                                  Label::negative};
    TreeConfig cfg;
    cfg.min_samples_leaf = 2;
    const auto tree = train_decision_tree(X, y, cfg);
    CHECK(tree.root().is_leaf()); // the only split would leave one sample on the left
}

// --- random forest -----------------------------------------------------------

TEST_CASE("a degenerate forest equals one plain decision tree") {
    Rng rng(32);
    const auto X = emoforge::testing::random_sparse(rng, 30, 5, 0.5, 0.0, 3.0);
    const auto y = random_labels(rng, 30);
    ForestConfig cfg;
    cfg.n_trees = 1;
    cfg.bootstrap = false;
    cfg.feature_subsample = false;
    const auto forest = train_random_forest(X, y, cfg);
    const auto tree = train_decision_tree(X, y);
    for (const auto& v : X) CHECK(forest.predict(v) == tree.predict(v));
}

TEST_CASE("forests are deterministic under a fixed seed") {
    Rng rng(33);
    const auto X = emoforge::testing::random_sparse(rng, 40, 6, 0.5, 0.0, 3.0);
    const auto y = random_labels(rng, 40);
    ForestConfig cfg;
    cfg.n_trees = 7;
    cfg.seed = 21;
    const auto a = train_random_forest(X, y, cfg);
    const auto b = train_random_forest(X, y, cfg);
    REQUIRE(a.trees.size() == b.trees.size());
    CHECK(a.tree_seeds == b.tree_seeds);
    for (const auto& v : X) CHECK(a.predict(v) == b.predict(v));
}

TEST_CASE("a pure corpus makes every forest tree a unanimous leaf") {
    const std::vector<SparseVector> X = {sv({{0, 1.0}}), sv({{1, 1.0}}), sv({{2, 1.0}})};
    const std::vector<Label> y(3, Label::negative);
    ForestConfig cfg;
    cfg.n_trees = 5;
    const auto forest = train_random_forest(X, y, cfg);
    for (const auto& t : forest.trees) {
        REQUIRE(t.nodes.size() == 1);
        CHECK(t.root().label == Label::negative);
    }
    CHECK(forest.predict(sv({})) == Label::negative);
}

TEST_CASE("forest votes are a multiset: tree order does not matter, ties go low") {
    Forest forest;
    forest.n_features = 1;
    forest.trees = {leaf_tree(Label::neutral), leaf_tree(Label::negative)};
    // One vote each: tie between negative(1) and neutral(2) -> negative.
    CHECK(forest.predict(sv({})) == Label::negative);
    std::swap(forest.trees[0], forest.trees[1]);
    CHECK(forest.predict(sv({})) == Label::negative);
}

// --- AdaBoost (SAMME) ---------------------------------------------------------

TEST_CASE("a perfect first stage stops boosting and carries the ensemble") {
    const std::vector<SparseVector> X = {sv({}), sv({}), sv({{0, 1.0}}), sv({{0, 1.0}})};
    const std::vector<Label> y = {Label::positive, Label::positive, Label::negative,
                                  Label::negative};
    BoostConfig cfg;
    cfg.n_stages = 10;
    const auto ensemble = train_adaboost(X, y, cfg);
    REQUIRE(ensemble.stages.size() == 1);
    for (std::size_t i = 0; i < X.size(); ++i) {
        CHECK(ensemble.predict(X[i]) == ensemble.stages[0].tree.predict(X[i]));
        CHECK(ensemble.predict(X[i]) == y[i]);
    }
}

TEST_CASE("a quarter-error two-class stage gets alpha = ln 3") {
    // Stump on f0 <= 0.5: left {pos,pos} pure, right {neg, pos} -> tie ->
    // positive, so exactly one of four samples is missed: eps = 0.25.
    const std::vector<SparseVector> X = {sv({}), sv({}), sv({{0, 1.0}}), sv({{0, 1.0}})};
    const std::vector<Label> y = {Label::positive, Label::positive, Label::negative,
                                  Label::positive};
    BoostConfig cfg;
    cfg.n_stages = 1;
    cfg.base_depth = 1;
    const auto ensemble = train_adaboost(X, y, cfg);
    REQUIRE(ensemble.stages.size() == 1);
    CHECK(ensemble.n_classes == 2);
    CHECK(ensemble.stages[0].alpha == Approx(std::log(3.0)).epsilon(1e-9));
}

TEST_CASE("boosting training error is non-increasing in stages on the 4-point fixture") {
    const std::vector<SparseVector> X = {sv({}), sv({{0, 1.0}}), sv({{1, 1.0}}),
                                         sv({{0, 1.0}, {1, 1.0}})};
    const std::vector<Label> y = {Label::positive, Label::negative, Label::neutral,
                                  Label::negative};
    BoostConfig cfg;
    cfg.n_stages = 12;
    const auto full = train_adaboost(X, y, cfg);
    REQUIRE(full.stages.size() >= 2);

    double previous_error = 1.0;
    for (std::size_t k = 1; k <= full.stages.size(); ++k) {
        BoostEnsemble truncated;
        truncated.n_classes = full.n_classes;
        truncated.n_features = full.n_features;
        truncated.stages.assign(full.stages.begin(),
                                full.stages.begin() + static_cast<std::ptrdiff_t>(k));
        std::size_t miss = 0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            miss += truncated.predict(X[i]) != y[i] ? 1 : 0;
        }
        const double error = static_cast<double>(miss) / static_cast<double>(X.size());
        CHECK(error <= previous_error + 1e-12);
        previous_error = error;
    }
}

TEST_CASE("a chance-level first stage raises a boost error") {
    // Two-class XOR: every stump errs exactly 1/2 = 1 - 1/C.
    const std::vector<SparseVector> X = {sv({}), sv({{0, 1.0}, {1, 1.0}}), sv({{0, 1.0}}),
                                         sv({{1, 1.0}})};
    const std::vector<Label> y = {Label::positive, Label::positive, Label::negative,
                                  Label::negative};
    BoostConfig cfg;
    cfg.base_depth = 1;
    REQUIRE_THROWS_MATCHES(
        train_adaboost(X, y, cfg), BoostError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("chance")));
}

TEST_CASE("boosting on the four-point fixture drives training error to zero") {
    const std::vector<SparseVector> X = {sv({}), sv({{0, 1.0}}), sv({{1, 1.0}}),
                                         sv({{0, 1.0}, {1, 1.0}})};
    const std::vector<Label> y = {Label::positive, Label::negative, Label::neutral,
                                  Label::negative};
    BoostConfig cfg;
    cfg.n_stages = 30;
    const auto ensemble = train_adaboost(X, y, cfg);
    std::size_t miss = 0;
    for (std::size_t i = 0; i < X.size(); ++i) miss += ensemble.predict(X[i]) != y[i] ? 1 : 0;
    CHECK(miss == 0);
}
