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

// Independent reference implementations used only by tests. Everything here
// is written the slow, obvious way (nested loops, dense maps) on purpose and
// must stay decoupled from the library's computation paths.

#ifndef EMOFORGE_TESTS_ORACLES_HPP
#define EMOFORGE_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "emoforge/label.hpp"
#include "emoforge/sparse.hpp"
#include "emoforge/textprep.hpp"

namespace emoforge::testing {

// ---------------------------------------------------------------------------
// TF-IDF by nested loops, no sparse structure, no shared code.
// ---------------------------------------------------------------------------

struct TfidfOracle {
    std::map<std::string, int> df;
    int total_docs = 0;

    static TfidfOracle fit(const std::vector<std::vector<std::string>>& docs) {
        TfidfOracle o;
        o.total_docs = static_cast<int>(docs.size());
        for (const auto& doc : docs) {
            std::set<std::string> distinct(doc.begin(), doc.end());
            for (const auto& t : distinct) o.df[t] += 1;
        }
        return o;
    }

    /// Weight of every term of `doc` that survives the filters.
    std::map<std::string, double> weights(const std::vector<std::string>& doc, int min_df,
                                          double max_df, int max_features) const {
        // Selection: highest df wins, ties by ascending term.
        std::vector<std::pair<std::string, int>> kept;
        for (const auto& [term, d] : df) {
            if (d >= min_df && static_cast<double>(d) / total_docs <= max_df) {
                kept.push_back({term, d});
            }
        }
        std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (static_cast<int>(kept.size()) > max_features) {
            kept.resize(static_cast<std::size_t>(max_features));
        }
        std::set<std::string> vocab;
        for (const auto& [term, d] : kept) vocab.insert(term);

        std::map<std::string, double> out;
        for (const auto& term : doc) {
            if (!vocab.contains(term)) continue;
            int tf = 0;
            for (const auto& t : doc) tf += t == term ? 1 : 0;
            const double idf = std::log(static_cast<double>(total_docs) / df.at(term));
            out[term] = tf * idf;
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Central finite differences over an arbitrary scalar function of a
// parameter vector accessed through a raw pointer.
// ---------------------------------------------------------------------------

inline double central_difference(double* param, const std::function<double()>& eval,
                                 double step) {
    const double saved = *param;
    *param = saved + step;
    const double up = eval();
    *param = saved - step;
    const double down = eval();
    *param = saved;
    return (up - down) / (2.0 * step);
}

inline double relative_error(double a, double b, double floor = 1e-3) {
    return std::abs(a - b) / std::max(std::abs(a) + std::abs(b), floor);
}

// ---------------------------------------------------------------------------
// Exhaustive CART split search. Mirrors the library's split-score definition
// (left_weight*gini(left) + right_weight*gini(right), midpoint thresholds,
// lowest-feature-then-lowest-threshold ties) but recounts everything from
// scratch with dense loops.
// ---------------------------------------------------------------------------

struct OracleSplit {
    bool found = false;
    std::uint32_t feature = 0;
    double threshold = 0.0;
    double score = 0.0;
};

inline OracleSplit exhaustive_best_split(const std::vector<SparseVector>& X,
                                         const std::vector<Label>& y, int n_features) {
    OracleSplit best;
    best.score = std::numeric_limits<double>::infinity();
    const std::size_t n = X.size();
    for (int f = 0; f < n_features; ++f) {
        std::vector<double> values;
        for (const auto& v : X) values.push_back(v.at(static_cast<std::uint32_t>(f)));
        std::vector<double> distinct = values;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (std::size_t k = 0; k + 1 < distinct.size(); ++k) {
            const double threshold = 0.5 * (distinct[k] + distinct[k + 1]);
            double left_counts[3] = {0, 0, 0};
            double right_counts[3] = {0, 0, 0};
            double left_weight = 0, right_weight = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (values[i] <= threshold) {
                    left_counts[label_code(y[i])] += 1.0;
                    left_weight += 1.0;
                } else {
                    right_counts[label_code(y[i])] += 1.0;
                    right_weight += 1.0;
                }
            }
            auto gini = [](const double counts[3], double weight) {
                double g = 1.0;
                for (int c = 0; c < 3; ++c) {
                    const double p = counts[c] / weight;
                    g -= p * p;
                }
                return g;
            };
            const double score = left_weight * gini(left_counts, left_weight) +
                                 right_weight * gini(right_counts, right_weight);
            if (score < best.score) {
                best.found = true;
                best.feature = static_cast<std::uint32_t>(f);
                best.threshold = threshold;
                best.score = score;
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Brute-force grid search over the binary SVM dual for tiny problems.
// Maximizes W(alpha) = sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
// subject to sum(alpha_i y_i) = 0 and 0 <= alpha <= C, on a coarse grid.
// ---------------------------------------------------------------------------

struct DualGridResult {
    std::vector<double> alpha;
    double objective = -std::numeric_limits<double>::infinity();
};

inline double dual_objective(const std::vector<double>& alpha, const std::vector<int>& y,
                             const std::vector<std::vector<double>>& K) {
    const std::size_t n = alpha.size();
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) obj += alpha[i];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            obj -= 0.5 * alpha[i] * alpha[j] * y[i] * y[j] * K[i][j];
        }
    }
    return obj;
}

inline DualGridResult brute_force_dual(const std::vector<int>& y,
                                       const std::vector<std::vector<double>>& K, double c_reg,
                                       int steps) {
    const std::size_t n = y.size();
    DualGridResult best;
    std::vector<double> alpha(n, 0.0);
    std::function<void(std::size_t)> recurse = [&](std::size_t i) {
        if (i == n) {
            double balance = 0.0;
            for (std::size_t k = 0; k < n; ++k) balance += alpha[k] * y[k];
            if (std::abs(balance) > 1e-9) return;
            const double obj = dual_objective(alpha, y, K);
            if (obj > best.objective) {
                best.objective = obj;
                best.alpha = alpha;
            }
            return;
        }
        for (int s = 0; s <= steps; ++s) {
            alpha[i] = c_reg * s / steps;
            recurse(i + 1);
        }
    };
    recurse(0);
    return best;
}

} // namespace emoforge::testing

#endif // EMOFORGE_TESTS_ORACLES_HPP
