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

#ifndef EMOFORGE_LINEAR_MODELS_HPP
#define EMOFORGE_LINEAR_MODELS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "emoforge/errors.hpp"
#include "emoforge/label.hpp"
#include "emoforge/rng.hpp"
#include "emoforge/sparse.hpp"

namespace emoforge {

enum class LinearKind { logistic, linear_svm };

/// Dense multiclass linear model: 3 x V weights plus a bias per class.
struct LinearModel {
    LinearKind kind = LinearKind::logistic;
    int n_features = 0;
    std::vector<double> weights;      // row-major, kNumLabels x n_features
    std::array<double, kNumLabels> bias{};

    double weight(int cls, std::uint32_t feature) const {
        return weights[static_cast<std::size_t>(cls) * static_cast<std::size_t>(n_features) + feature];
    }
};

struct TrainConfig {
    double learning_rate = 0.1;
    double l2 = 1e-4;
    int max_epochs = 500;
    double tolerance = 1e-6;
    std::uint64_t seed = 0;
    int batch_size = 0;  // 0 = full batch
    int n_features = 0;  // 0 = infer from the data
};

inline TrainConfig linear_svm_defaults() {
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    return cfg;
}

namespace detail {

inline int resolve_width(std::span<const SparseVector> X, int configured) {
    if (configured > 0) return configured;
    return static_cast<int>(infer_width(X));
}

inline void check_train_input(std::span<const SparseVector> X, std::span<const Label> y) {
    if (X.empty() || X.size() != y.size()) {
        throw ShapeError("training needs equal, nonzero sample/label counts (" +
                         std::to_string(X.size()) + " vs " + std::to_string(y.size()) + ")");
    }
}

inline int count_classes(std::span<const Label> y) {
    std::array<bool, kNumLabels> seen{};
    for (Label l : y) seen[static_cast<std::size_t>(label_code(l))] = true;
    int n = 0;
    for (bool s : seen) n += s ? 1 : 0;
    return n;
}

inline std::array<double, kNumLabels> softmax(const std::array<double, kNumLabels>& scores) {
    const double m = *std::max_element(scores.begin(), scores.end());
    std::array<double, kNumLabels> p{};
    double z = 0.0;
    for (int c = 0; c < kNumLabels; ++c) {
        p[static_cast<std::size_t>(c)] = std::exp(scores[static_cast<std::size_t>(c)] - m);
        z += p[static_cast<std::size_t>(c)];
    }
    for (auto& v : p) v /= z;
    return p;
}

} // namespace detail

/// Raw class scores W x + b.
inline std::array<double, kNumLabels> decision_scores(const LinearModel& model,
                                                      const SparseVector& v) {
    if (v.min_width() > static_cast<std::uint32_t>(model.n_features)) {
        throw ShapeError("feature index " + std::to_string(v.min_width() - 1) +
                         " out of range for model width " + std::to_string(model.n_features));
    }
    std::array<double, kNumLabels> scores = model.bias;
    const std::size_t V = static_cast<std::size_t>(model.n_features);
    for (int c = 0; c < kNumLabels; ++c) {
        const double* row = model.weights.data() + static_cast<std::size_t>(c) * V;
        double acc = 0.0;
        for (const auto& [i, w] : v.entries) acc += row[i] * w;
        scores[static_cast<std::size_t>(c)] += acc;
    }
    return scores;
}

inline Label argmax_label(const std::array<double, kNumLabels>& scores) {
    int best = 0;
    for (int c = 1; c < kNumLabels; ++c) {
        if (scores[static_cast<std::size_t>(c)] > scores[static_cast<std::size_t>(best)]) best = c;
    }
    return label_from_code(best);
}

inline Label predict_one(const LinearModel& model, const SparseVector& v) {
    return argmax_label(decision_scores(model, v));
}

inline std::vector<Label> predict(const LinearModel& model, std::span<const SparseVector> X) {
    std::vector<Label> out;
    out.reserve(X.size());
    for (const auto& v : X) out.push_back(predict_one(model, v));
    return out;
}

/// Softmax probabilities; defined for the logistic kind only.
inline std::array<double, kNumLabels> predict_proba_one(const LinearModel& model,
                                                        const SparseVector& v) {
    if (model.kind != LinearKind::logistic) {
        throw Error("predict_proba is unavailable for SVM models; use decision_scores");
    }
    return detail::softmax(decision_scores(model, v));
}

inline std::vector<std::array<double, kNumLabels>> predict_proba(
        const LinearModel& model, std::span<const SparseVector> X) {
    std::vector<std::array<double, kNumLabels>> out;
    out.reserve(X.size());
    for (const auto& v : X) out.push_back(predict_proba_one(model, v));
    return out;
}

/// Multinomial cross-entropy objective, averaged over the batch, plus
/// (l2/2)*||W||^2 (bias unregularized). Fills grad_W/grad_b when non-empty;
/// the analytic gradients here are what the finite-difference suite checks.
inline double logistic_objective(std::span<const SparseVector> X, std::span<const Label> y,
                                 std::span<const double> W,
                                 std::span<const double> b, double l2, int n_features,
                                 std::span<double> grad_W = {},
                                 std::span<double> grad_b = {}) {
    const std::size_t N = X.size();
    const std::size_t V = static_cast<std::size_t>(n_features);
    const bool want_grad = !grad_W.empty();
    if (want_grad) {
        std::fill(grad_W.begin(), grad_W.end(), 0.0);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);
    }
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(N);
    for (std::size_t i = 0; i < N; ++i) {
        std::array<double, kNumLabels> scores{};
        for (int c = 0; c < kNumLabels; ++c) {
            const double* row = W.data() + static_cast<std::size_t>(c) * V;
            double acc = b[static_cast<std::size_t>(c)];
            for (const auto& [idx, w] : X[i].entries) acc += row[idx] * w;
            scores[static_cast<std::size_t>(c)] = acc;
        }
        const double m = *std::max_element(scores.begin(), scores.end());
        double z = 0.0;
        std::array<double, kNumLabels> p{};
        for (int c = 0; c < kNumLabels; ++c) {
            p[static_cast<std::size_t>(c)] = std::exp(scores[static_cast<std::size_t>(c)] - m);
            z += p[static_cast<std::size_t>(c)];
        }
        const int target = label_code(y[i]);
        loss -= (scores[static_cast<std::size_t>(target)] - m - std::log(z)) * inv_n;
        if (want_grad) {
            for (int c = 0; c < kNumLabels; ++c) {
                const double g = (p[static_cast<std::size_t>(c)] / z -
                                  (c == target ? 1.0 : 0.0)) * inv_n;
                grad_b[static_cast<std::size_t>(c)] += g;
                double* grow = grad_W.data() + static_cast<std::size_t>(c) * V;
                for (const auto& [idx, w] : X[i].entries) grow[idx] += g * w;
            }
        }
    }
    double reg = 0.0;
    for (double w : W) reg += w * w;
    loss += 0.5 * l2 * reg;
    if (want_grad) {
        for (std::size_t i = 0; i < W.size(); ++i) grad_W[i] += l2 * W[i];
    }
    return loss;
}

/// One-vs-rest hinge objective for a single binary problem, y in {-1,+1}:
/// (1/N) sum max(0, 1 - y f(x)) + (l2/2)*||w||^2. Subgradient 0 at the kink.
inline double hinge_objective(std::span<const SparseVector> X, std::span<const int> y_pm,
                              std::span<const double> w, double b, double l2,
                              std::span<double> grad_w = {}, double* grad_b = nullptr) {
    const bool want_grad = !grad_w.empty();
    if (want_grad) {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        *grad_b = 0.0;
    }
    const double inv_n = 1.0 / static_cast<double>(X.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double f = b;
        for (const auto& [idx, val] : X[i].entries) f += w[idx] * val;
        const double margin = 1.0 - static_cast<double>(y_pm[i]) * f;
        if (margin > 0.0) {
            loss += margin * inv_n;
            if (want_grad) {
                const double g = -static_cast<double>(y_pm[i]) * inv_n;
                *grad_b += g;
                for (const auto& [idx, val] : X[i].entries) grad_w[idx] += g * val;
            }
        }
    }
    double reg = 0.0;
    for (double v : w) reg += v * v;
    loss += 0.5 * l2 * reg;
    if (want_grad) {
        for (std::size_t i = 0; i < w.size(); ++i) grad_w[i] += l2 * w[i];
    }
    return loss;
}

/// Multinomial logistic regression by (mini-)batch gradient descent from a
/// zero start. Stops when the epoch-over-epoch decrease of the full
/// objective drops below `tolerance` or max_epochs is reached. Fills
/// `epoch_loss` (when given) with the objective after each epoch.
inline LinearModel train_logistic(std::span<const SparseVector> X, std::span<const Label> y,
                                  const TrainConfig& config = {},
                                  std::vector<double>* epoch_loss = nullptr) {
    detail::check_train_input(X, y);
    if (detail::count_classes(y) < 2) {
        throw ShapeError("logistic training needs at least 2 classes");
    }
    const int V = detail::resolve_width(X, config.n_features);

    LinearModel model;
    model.kind = LinearKind::logistic;
    model.n_features = V;
    model.weights.assign(static_cast<std::size_t>(kNumLabels) * static_cast<std::size_t>(V), 0.0);

    const std::size_t N = X.size();
    const std::size_t batch = config.batch_size <= 0
        ? N
        : std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), N);

    std::vector<double> grad_w(model.weights.size());
    std::array<double, kNumLabels> grad_b{};
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(config.seed);

    std::vector<SparseVector> chunk_x;
    std::vector<Label> chunk_y;
    double prev_loss = std::numeric_limits<double>::infinity();
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        if (batch < N) rng.shuffle(order);
        for (std::size_t start = 0; start < N; start += batch) {
            const std::size_t stop = std::min(start + batch, N);
            std::span<const SparseVector> bx;
            std::span<const Label> by;
            if (batch == N) {
                bx = X;
                by = y;
            } else {
                chunk_x.clear();
                chunk_y.clear();
                for (std::size_t i = start; i < stop; ++i) {
                    chunk_x.push_back(X[order[i]]);
                    chunk_y.push_back(y[order[i]]);
                }
                bx = chunk_x;
                by = chunk_y;
            }
            logistic_objective(bx, by, model.weights, model.bias, config.l2, V,
                               grad_w, grad_b);
            for (std::size_t i = 0; i < grad_w.size(); ++i) {
                model.weights[i] -= config.learning_rate * grad_w[i];
            }
            for (int c = 0; c < kNumLabels; ++c) {
                model.bias[static_cast<std::size_t>(c)] -=
                    config.learning_rate * grad_b[static_cast<std::size_t>(c)];
            }
        }
        const double loss = logistic_objective(X, y, model.weights, model.bias, config.l2, V);
        if (!std::isfinite(loss)) {
            throw DivergenceError("logistic training diverged at epoch " +
                                  std::to_string(epoch) + " (learning rate " +
                                  std::to_string(config.learning_rate) + ")");
        }
        if (epoch_loss) epoch_loss->push_back(loss);
        if (prev_loss - loss < config.tolerance) break;
        prev_loss = loss;
    }
    return model;
}

/// One-vs-rest linear SVM: one hinge subproblem per class by subgradient
/// descent, prediction by maximum decision score.
inline LinearModel train_linear_svm(std::span<const SparseVector> X, std::span<const Label> y,
                                    const TrainConfig& config = linear_svm_defaults()) {
    detail::check_train_input(X, y);
    if (detail::count_classes(y) < 2) {
        throw ShapeError("linear SVM training needs at least 2 classes");
    }
    const int V = detail::resolve_width(X, config.n_features);

    LinearModel model;
    model.kind = LinearKind::linear_svm;
    model.n_features = V;
    model.weights.assign(static_cast<std::size_t>(kNumLabels) * static_cast<std::size_t>(V), 0.0);

    const std::size_t N = X.size();
    const std::size_t batch = config.batch_size <= 0
        ? N
        : std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), N);

    std::vector<int> y_pm(N);
    std::vector<double> w(static_cast<std::size_t>(V));
    std::vector<double> grad_w(w.size());
    std::vector<std::size_t> order(N);

    for (int cls = 0; cls < kNumLabels; ++cls) {
        for (std::size_t i = 0; i < N; ++i) {
            y_pm[i] = label_code(y[i]) == cls ? 1 : -1;
        }
        std::fill(w.begin(), w.end(), 0.0);
        double b = 0.0;
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(cls)));

        std::vector<SparseVector> chunk_x;
        std::vector<int> chunk_y;
        double prev_loss = std::numeric_limits<double>::infinity();
        for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
            if (batch < N) rng.shuffle(order);
            for (std::size_t start = 0; start < N; start += batch) {
                const std::size_t stop = std::min(start + batch, N);
                std::span<const SparseVector> bx;
                std::span<const int> by;
                if (batch == N) {
                    bx = X;
                    by = y_pm;
                } else {
                    chunk_x.clear();
                    chunk_y.clear();
                    for (std::size_t i = start; i < stop; ++i) {
                        chunk_x.push_back(X[order[i]]);
                        chunk_y.push_back(y_pm[order[i]]);
                    }
                    bx = chunk_x;
                    by = chunk_y;
                }
                double gb = 0.0;
                hinge_objective(bx, by, w, b, config.l2, grad_w, &gb);
                for (std::size_t i = 0; i < w.size(); ++i) {
                    w[i] -= config.learning_rate * grad_w[i];
                }
                b -= config.learning_rate * gb;
            }
            const double loss = hinge_objective(X, y_pm, w, b, config.l2);
            if (!std::isfinite(loss)) {
                throw DivergenceError("linear SVM training diverged at epoch " +
                                      std::to_string(epoch) + " (learning rate " +
                                      std::to_string(config.learning_rate) + ")");
            }
            if (prev_loss - loss < config.tolerance) break;
            prev_loss = loss;
        }
        std::copy(w.begin(), w.end(),
                  model.weights.begin() + static_cast<std::size_t>(cls) * static_cast<std::size_t>(V));
        model.bias[static_cast<std::size_t>(cls)] = b;
    }
    return model;
}

// ---------------------------------------------------------------------------
// RBF-kernel SVM (one-vs-rest binary machines solved by simplified SMO)
// ---------------------------------------------------------------------------

struct RbfConfig {
    double gamma = 0.0;         // <= 0 means 1/n_features
    double c_reg = 1.0;
    double tolerance = 1e-3;    // KKT violation tolerance
    int max_passes = 10;        // consecutive no-progress sweeps before stopping
    std::uint64_t seed = 0;
    std::size_t sample_cap = 5000;
    int n_features = 0;
};

struct KernelSvmModel {
    double gamma = 1.0;
    double c_reg = 1.0;
    int n_features = 0;
    std::vector<SparseVector> support_vectors;
    std::array<std::vector<double>, kNumLabels> dual_coef; // alpha_i * y_i per class
    std::array<double, kNumLabels> bias{};
};

inline double rbf_kernel(const SparseVector& a, const SparseVector& b, double gamma) {
    return std::exp(-gamma * squared_distance(a, b));
}

namespace detail {

struct SmoResult {
    std::vector<double> alpha;
    double bias = 0.0;
};

/// Simplified SMO over a binary problem: sweep candidates, pick a random
/// partner, solve the two-variable subproblem analytically, clip to the box.
/// Stops after `max_passes` consecutive sweeps without progress.
template <typename KernelFn>
SmoResult simplified_smo(std::size_t n, std::span<const int> y, KernelFn&& kernel,
                         double c_reg, double tol, int max_passes, Rng rng) {
    SmoResult res;
    res.alpha.assign(n, 0.0);
    if (n < 2) return res;
    auto& alpha = res.alpha;
    double& b = res.bias;

    auto decision = [&](std::size_t i) {
        double f = b;
        for (std::size_t j = 0; j < n; ++j) {
            if (alpha[j] != 0.0) f += alpha[j] * y[j] * kernel(j, i);
        }
        return f;
    };

    int passes = 0;
    long long guard = 0;
    const long long guard_limit = 2000LL * static_cast<long long>(n) + 100000;
    while (passes < max_passes && guard < guard_limit) {
        int changed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            ++guard;
            const double e_i = decision(i) - y[i];
            const double r = y[i] * e_i;
            if (!((r < -tol && alpha[i] < c_reg) || (r > tol && alpha[i] > 0.0))) continue;

            std::size_t j = static_cast<std::size_t>(rng.below(n - 1));
            if (j >= i) ++j;
            const double e_j = decision(j) - y[j];
            const double ai_old = alpha[i], aj_old = alpha[j];
            double lo, hi;
            if (y[i] != y[j]) {
                lo = std::max(0.0, aj_old - ai_old);
                hi = std::min(c_reg, c_reg + aj_old - ai_old);
            } else {
                lo = std::max(0.0, ai_old + aj_old - c_reg);
                hi = std::min(c_reg, ai_old + aj_old);
            }
            if (lo >= hi) continue;
            const double k_ii = kernel(i, i), k_jj = kernel(j, j), k_ij = kernel(i, j);
            const double eta = 2.0 * k_ij - k_ii - k_jj;
            if (eta >= 0.0) continue;
            double aj_new = aj_old - y[j] * (e_i - e_j) / eta;
            aj_new = std::clamp(aj_new, lo, hi);
            if (std::abs(aj_new - aj_old) < 1e-5) continue;
            const double ai_new = ai_old + y[i] * y[j] * (aj_old - aj_new);
            alpha[i] = ai_new;
            alpha[j] = aj_new;
            const double b1 = b - e_i - y[i] * (ai_new - ai_old) * k_ii -
                              y[j] * (aj_new - aj_old) * k_ij;
            const double b2 = b - e_j - y[i] * (ai_new - ai_old) * k_ij -
                              y[j] * (aj_new - aj_old) * k_jj;
            if (ai_new > 0.0 && ai_new < c_reg) b = b1;
            else if (aj_new > 0.0 && aj_new < c_reg) b = b2;
            else b = 0.5 * (b1 + b2);
            ++changed;
        }
        passes = changed == 0 ? passes + 1 : 0;
    }
    return res;
}

} // namespace detail

/// One-vs-rest RBF SVM. Kernel methods are quadratic in sample count, so the
/// trainer enforces a documented sample cap; subsample before calling when
/// the corpus is larger.
inline KernelSvmModel train_rbf_svm(std::span<const SparseVector> X, std::span<const Label> y,
                                    const RbfConfig& config = {}) {
    detail::check_train_input(X, y);
    if (X.size() > config.sample_cap) {
        throw SizeError("RBF SVM sample cap exceeded: " + std::to_string(X.size()) + " > " +
                        std::to_string(config.sample_cap) + "; subsample the training set");
    }
    const int V = detail::resolve_width(X, config.n_features);
    const double gamma = config.gamma > 0.0
        ? config.gamma
        : 1.0 / static_cast<double>(std::max(V, 1));

    const std::size_t n = X.size();
    // Precompute the Gram matrix when it fits comfortably; fall back to
    // on-demand evaluation for big inputs under the cap.
    const bool cache = n <= 3000;
    std::vector<double> gram;
    if (cache) {
        gram.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            gram[i * n + i] = 1.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                const double k = rbf_kernel(X[i], X[j], gamma);
                gram[i * n + j] = k;
                gram[j * n + i] = k;
            }
        }
    }
    auto kernel = [&](std::size_t i, std::size_t j) {
        return cache ? gram[i * n + j] : rbf_kernel(X[i], X[j], gamma);
    };

    std::array<std::vector<double>, kNumLabels> coef_full;
    std::array<double, kNumLabels> bias{};
    std::vector<int> y_pm(n);
    for (int cls = 0; cls < kNumLabels; ++cls) {
        for (std::size_t i = 0; i < n; ++i) y_pm[i] = label_code(y[i]) == cls ? 1 : -1;
        auto res = detail::simplified_smo(n, y_pm, kernel, config.c_reg, config.tolerance,
                                          config.max_passes,
                                          Rng(mix_seed(config.seed, static_cast<std::uint64_t>(cls))));
        auto& coef = coef_full[static_cast<std::size_t>(cls)];
        coef.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) coef[i] = res.alpha[i] * y_pm[i];
        bias[static_cast<std::size_t>(cls)] = res.bias;
    }

    KernelSvmModel model;
    model.gamma = gamma;
    model.c_reg = config.c_reg;
    model.n_features = V;
    model.bias = bias;
    for (std::size_t i = 0; i < n; ++i) {
        bool is_sv = false;
        for (int cls = 0; cls < kNumLabels; ++cls) {
            if (coef_full[static_cast<std::size_t>(cls)][i] != 0.0) is_sv = true;
        }
        if (!is_sv) continue;
        model.support_vectors.push_back(X[i]);
        for (int cls = 0; cls < kNumLabels; ++cls) {
            model.dual_coef[static_cast<std::size_t>(cls)].push_back(
                coef_full[static_cast<std::size_t>(cls)][i]);
        }
    }
    return model;
}

inline std::array<double, kNumLabels> svm_decision(const KernelSvmModel& model,
                                                   const SparseVector& v) {
    if (v.min_width() > static_cast<std::uint32_t>(model.n_features)) {
        throw ShapeError("feature index " + std::to_string(v.min_width() - 1) +
                         " out of range for model width " + std::to_string(model.n_features));
    }
    std::array<double, kNumLabels> scores = model.bias;
    for (std::size_t s = 0; s < model.support_vectors.size(); ++s) {
        const double k = rbf_kernel(model.support_vectors[s], v, model.gamma);
        for (int cls = 0; cls < kNumLabels; ++cls) {
            scores[static_cast<std::size_t>(cls)] +=
                model.dual_coef[static_cast<std::size_t>(cls)][s] * k;
        }
    }
    return scores;
}

inline Label predict_one(const KernelSvmModel& model, const SparseVector& v) {
    return argmax_label(svm_decision(model, v));
}

inline std::vector<Label> predict(const KernelSvmModel& model, std::span<const SparseVector> X) {
    std::vector<Label> out;
    out.reserve(X.size());
    for (const auto& v : X) out.push_back(predict_one(model, v));
    return out;
}

} // namespace emoforge

#endif // EMOFORGE_LINEAR_MODELS_HPP
