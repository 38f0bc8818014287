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

#ifndef EMOFORGE_NEURAL_HPP
#define EMOFORGE_NEURAL_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "emoforge/errors.hpp"
#include "emoforge/label.hpp"
#include "emoforge/linear_models.hpp" // argmax_label
#include "emoforge/rng.hpp"
#include "emoforge/vectorizer.hpp"

namespace emoforge {

struct CnnConfig {
    int embed_dim = 32; // d
    int filters = 64;   // F
    int kernel = 3;     // width-3 kernels spanning the embedding depth
    int max_len = 40;
    std::uint64_t seed = 0;
};

/// Embedding table + one valid-mode 1-D convolution layer with rectifier and
/// global max pooling + softmax output. Row 0 of the embedding is the pad
/// row: pinned to zero, never updated. Row 1 is the (trainable) OOV row.
struct CnnModel {
    int vocab_size = 0; // V; the table has V+2 rows
    int embed_dim = 0;
    int filters = 0;
    int kernel = 0;
    int max_len = 0;
    std::uint64_t seed = 0;

    std::vector<double> embedding; // (V+2) x d, row-major
    std::vector<double> conv_w;    // F x k x d
    std::vector<double> conv_b;    // F
    std::vector<double> dense_w;   // 3 x F
    std::vector<double> dense_b;   // 3

    std::size_t parameter_count() const {
        return embedding.size() + conv_w.size() + conv_b.size() + dense_w.size() +
               dense_b.size();
    }
};

struct CnnGradients {
    std::vector<double> embedding, conv_w, conv_b, dense_w, dense_b;

    void match(const CnnModel& m) {
        embedding.assign(m.embedding.size(), 0.0);
        conv_w.assign(m.conv_w.size(), 0.0);
        conv_b.assign(m.conv_b.size(), 0.0);
        dense_w.assign(m.dense_w.size(), 0.0);
        dense_b.assign(m.dense_b.size(), 0.0);
    }
};

/// Embedding and dense weights uniform in [-0.05, 0.05]; conv kernels the
/// same draw scaled by 1/sqrt(k*d); biases zero; pad row zeroed last.
inline CnnModel init_cnn(int vocab_size, const CnnConfig& config) {
    if (config.embed_dim < 1 || config.filters < 1 || config.kernel < 1 ||
        config.max_len < 1 || vocab_size < 0) {
        throw ConfigError("CNN dimensions must be >= 1");
    }
    if (config.kernel > config.max_len) {
        throw ConfigError("kernel width " + std::to_string(config.kernel) +
                          " exceeds max_len " + std::to_string(config.max_len));
    }
    CnnModel m;
    m.vocab_size = vocab_size;
    m.embed_dim = config.embed_dim;
    m.filters = config.filters;
    m.kernel = config.kernel;
    m.max_len = config.max_len;
    m.seed = config.seed;

    Rng rng(config.seed);
    const std::size_t rows = static_cast<std::size_t>(vocab_size) + 2;
    const std::size_t d = static_cast<std::size_t>(config.embed_dim);
    const std::size_t f = static_cast<std::size_t>(config.filters);
    const std::size_t k = static_cast<std::size_t>(config.kernel);

    m.embedding.resize(rows * d);
    for (auto& w : m.embedding) w = rng.uniform(-0.05, 0.05);
    m.conv_w.resize(f * k * d);
    const double conv_scale = 1.0 / std::sqrt(static_cast<double>(k * d));
    for (auto& w : m.conv_w) w = rng.uniform(-0.05, 0.05) * conv_scale;
    m.conv_b.assign(f, 0.0);
    m.dense_w.resize(static_cast<std::size_t>(kNumLabels) * f);
    for (auto& w : m.dense_w) w = rng.uniform(-0.05, 0.05);
    m.dense_b.assign(kNumLabels, 0.0);

    std::fill(m.embedding.begin(), m.embedding.begin() + static_cast<std::ptrdiff_t>(d), 0.0);
    return m;
}

namespace detail {

struct CnnScratch {
    std::vector<double> emb;    // max_len x d
    std::vector<double> z;      // filters x positions
    std::vector<double> pooled; // filters
    std::vector<int> arg;       // filters (first maximal position)
    std::array<double, kNumLabels> probs{};
};

inline void check_batch(const CnnModel& m, const SequenceBatch& batch) {
    if (batch.max_len != m.max_len) {
        throw ShapeError("sequence length " + std::to_string(batch.max_len) +
                         " does not match model max_len " + std::to_string(m.max_len));
    }
    const auto limit = static_cast<std::int32_t>(m.vocab_size) + 2;
    for (auto code : batch.codes) {
        if (code < 0 || code >= limit) {
            throw ShapeError("sequence code " + std::to_string(code) +
                             " out of range [0, " + std::to_string(limit) + ")");
        }
    }
}

/// Forward one row; fills scratch and returns the probability triple.
inline std::array<double, kNumLabels> cnn_forward_row(const CnnModel& m,
                                                      std::span<const std::int32_t> codes,
                                                      CnnScratch& s) {
    const int L = m.max_len, d = m.embed_dim, F = m.filters, k = m.kernel;
    const int P = L - k + 1;

    s.emb.resize(static_cast<std::size_t>(L) * static_cast<std::size_t>(d));
    for (int t = 0; t < L; ++t) {
        const double* row = m.embedding.data() +
            static_cast<std::size_t>(codes[static_cast<std::size_t>(t)]) * static_cast<std::size_t>(d);
        std::copy(row, row + d, s.emb.begin() + static_cast<std::ptrdiff_t>(t) * d);
    }

    s.z.resize(static_cast<std::size_t>(F) * static_cast<std::size_t>(P));
    s.pooled.assign(static_cast<std::size_t>(F), 0.0);
    s.arg.assign(static_cast<std::size_t>(F), 0);
    for (int f = 0; f < F; ++f) {
        const double* kernel = m.conv_w.data() +
            static_cast<std::size_t>(f) * static_cast<std::size_t>(k) * static_cast<std::size_t>(d);
        double best = -std::numeric_limits<double>::infinity();
        int best_p = 0;
        for (int p = 0; p < P; ++p) {
            double acc = m.conv_b[static_cast<std::size_t>(f)];
            const double* window = s.emb.data() + static_cast<std::size_t>(p) * static_cast<std::size_t>(d);
            for (int i = 0; i < k * d; ++i) acc += kernel[i] * window[i];
            s.z[static_cast<std::size_t>(f) * static_cast<std::size_t>(P) + static_cast<std::size_t>(p)] = acc;
            const double activated = acc > 0.0 ? acc : 0.0;
            if (activated > best) {
                best = activated;
                best_p = p;
            }
        }
        s.pooled[static_cast<std::size_t>(f)] = best;
        s.arg[static_cast<std::size_t>(f)] = best_p;
    }

    std::array<double, kNumLabels> logits{};
    for (int c = 0; c < kNumLabels; ++c) {
        double acc = m.dense_b[static_cast<std::size_t>(c)];
        const double* row = m.dense_w.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(F);
        for (int f = 0; f < F; ++f) acc += row[f] * s.pooled[static_cast<std::size_t>(f)];
        logits[static_cast<std::size_t>(c)] = acc;
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (int c = 0; c < kNumLabels; ++c) {
        s.probs[static_cast<std::size_t>(c)] = std::exp(logits[static_cast<std::size_t>(c)] - mx);
        z += s.probs[static_cast<std::size_t>(c)];
    }
    for (auto& p : s.probs) p /= z;
    return s.probs;
}

} // namespace detail

/// Probability rows for every sequence in the batch.
inline std::vector<std::array<double, kNumLabels>> cnn_forward(const CnnModel& m,
                                                               const SequenceBatch& batch) {
    detail::check_batch(m, batch);
    detail::CnnScratch scratch;
    std::vector<std::array<double, kNumLabels>> out;
    out.reserve(batch.rows);
    for (std::size_t r = 0; r < batch.rows; ++r) {
        out.push_back(detail::cnn_forward_row(m, batch.row(r), scratch));
    }
    return out;
}

inline std::vector<Label> cnn_predict(const CnnModel& m, const SequenceBatch& batch) {
    auto probs = cnn_forward(m, batch);
    std::vector<Label> out;
    out.reserve(probs.size());
    for (const auto& p : probs) out.push_back(argmax_label(p));
    return out;
}

/// Mean categorical cross-entropy over `rows` (all rows when empty), with
/// full backpropagation into `grads` when given. Max-pool gradient goes to
/// the first maximal position; the pad embedding row receives no gradient.
inline double cnn_loss_grad(const CnnModel& m, const SequenceBatch& batch,
                            std::span<const Label> labels,
                            std::span<const std::size_t> rows = {},
                            CnnGradients* grads = nullptr) {
    detail::check_batch(m, batch);
    if (batch.rows != labels.size()) {
        throw ShapeError("batch rows and label count differ");
    }
    std::vector<std::size_t> all;
    if (rows.empty()) {
        all.resize(batch.rows);
        std::iota(all.begin(), all.end(), std::size_t{0});
        rows = all;
    }
    if (grads) grads->match(m);

    const int d = m.embed_dim, F = m.filters, k = m.kernel;
    const int P = m.max_len - k + 1;
    const double scale = 1.0 / static_cast<double>(rows.size());

    detail::CnnScratch s;
    double loss = 0.0;
    for (std::size_t r : rows) {
        const auto codes = batch.row(r);
        const auto probs = detail::cnn_forward_row(m, codes, s);
        const int target = label_code(labels[r]);
        loss -= std::log(std::max(probs[static_cast<std::size_t>(target)], 1e-300)) * scale;
        if (!grads) continue;

        std::array<double, kNumLabels> dlogit{};
        for (int c = 0; c < kNumLabels; ++c) {
            dlogit[static_cast<std::size_t>(c)] =
                (probs[static_cast<std::size_t>(c)] - (c == target ? 1.0 : 0.0)) * scale;
        }
        std::vector<double> dpool(static_cast<std::size_t>(F), 0.0);
        for (int c = 0; c < kNumLabels; ++c) {
            const double g = dlogit[static_cast<std::size_t>(c)];
            grads->dense_b[static_cast<std::size_t>(c)] += g;
            const std::size_t base = static_cast<std::size_t>(c) * static_cast<std::size_t>(F);
            for (int f = 0; f < F; ++f) {
                grads->dense_w[base + static_cast<std::size_t>(f)] +=
                    g * s.pooled[static_cast<std::size_t>(f)];
                dpool[static_cast<std::size_t>(f)] +=
                    g * m.dense_w[base + static_cast<std::size_t>(f)];
            }
        }
        for (int f = 0; f < F; ++f) {
            const int p = s.arg[static_cast<std::size_t>(f)];
            const double z = s.z[static_cast<std::size_t>(f) * static_cast<std::size_t>(P) +
                                 static_cast<std::size_t>(p)];
            if (z <= 0.0) continue; // rectifier gate closed at the pooled position
            const double dz = dpool[static_cast<std::size_t>(f)];
            grads->conv_b[static_cast<std::size_t>(f)] += dz;
            const std::size_t kbase = static_cast<std::size_t>(f) *
                static_cast<std::size_t>(k) * static_cast<std::size_t>(d);
            const double* window = s.emb.data() +
                static_cast<std::size_t>(p) * static_cast<std::size_t>(d);
            for (int i = 0; i < k * d; ++i) {
                grads->conv_w[kbase + static_cast<std::size_t>(i)] += dz * window[i];
            }
            for (int i = 0; i < k; ++i) {
                const auto code = codes[static_cast<std::size_t>(p + i)];
                if (code == SequenceBatch::kPad) continue;
                double* erow = grads->embedding.data() +
                    static_cast<std::size_t>(code) * static_cast<std::size_t>(d);
                const double* kr = m.conv_w.data() + kbase +
                    static_cast<std::size_t>(i) * static_cast<std::size_t>(d);
                for (int j = 0; j < d; ++j) erow[j] += dz * kr[j];
            }
        }
    }
    return loss;
}

inline double cnn_loss(const CnnModel& m, const SequenceBatch& batch,
                       std::span<const Label> labels) {
    return cnn_loss_grad(m, batch, labels);
}

/// One gradient-descent step on the given rows; returns the pre-update loss.
inline double cnn_train_step(CnnModel& m, const SequenceBatch& batch,
                             std::span<const Label> labels,
                             std::span<const std::size_t> rows, double learning_rate,
                             CnnGradients& grads) {
    const double loss = cnn_loss_grad(m, batch, labels, rows, &grads);
    auto apply = [lr = learning_rate](std::vector<double>& param, const std::vector<double>& g) {
        for (std::size_t i = 0; i < param.size(); ++i) param[i] -= lr * g[i];
    };
    apply(m.embedding, grads.embedding);
    apply(m.conv_w, grads.conv_w);
    apply(m.conv_b, grads.conv_b);
    apply(m.dense_w, grads.dense_w);
    apply(m.dense_b, grads.dense_b);
    return loss;
}

struct EpochRecord {
    int epoch = 0; // 1-based
    double loss = 0.0;
    double accuracy = 0.0;
    double val_accuracy = 0.0;
    bool has_val = false;
    double seconds = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    double total_seconds = 0.0;

    std::string to_csv() const {
        std::ostringstream out;
        out << "epoch,loss,accuracy,seconds\n";
        for (const auto& e : epochs) {
            out << e.epoch << ',' << e.loss << ',' << e.accuracy << ',' << e.seconds << '\n';
        }
        return out.str();
    }
};

struct CnnTrainConfig {
    CnnConfig model;
    int vocab_size = 0; // 0 = infer from the batch codes
    int epochs = 10;
    int batch_size = 64;
    double learning_rate = 0.1;
};

inline double cnn_accuracy(const CnnModel& m, const SequenceBatch& batch,
                           std::span<const Label> labels) {
    const auto pred = cnn_predict(m, batch);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == labels[i] ? 1u : 0u;
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

/// Seeded-shuffled mini-batch SGD on mean cross-entropy. Deterministic for a
/// fixed seed; records one history row per epoch.
inline std::pair<CnnModel, TrainHistory> train_cnn(const SequenceBatch& train,
                                                   std::span<const Label> labels,
                                                   const CnnTrainConfig& config,
                                                   const SequenceBatch* val = nullptr,
                                                   std::span<const Label> val_labels = {}) {
    if (train.rows == 0 || train.rows != labels.size()) {
        throw ShapeError("CNN training needs a non-empty batch with matching labels");
    }
    if (train.max_len != config.model.max_len) {
        throw ConfigError("training batch max_len " + std::to_string(train.max_len) +
                          " does not match configured max_len " +
                          std::to_string(config.model.max_len));
    }
    int vocab_size = config.vocab_size;
    if (vocab_size <= 0) {
        std::int32_t max_code = 1;
        for (auto c : train.codes) max_code = std::max(max_code, c);
        vocab_size = max_code - 1;
    }

    CnnModel model = init_cnn(vocab_size, config.model);
    TrainHistory history;
    Rng rng(mix_seed(config.model.seed, 0x7261696eULL)); // shuffle stream

    const std::size_t n = train.rows;
    const std::size_t batch_size = config.batch_size <= 0
        ? n
        : std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    CnnGradients grads;

    const auto t0 = std::chrono::steady_clock::now();
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const auto e0 = std::chrono::steady_clock::now();
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += batch_size) {
            const std::size_t stop = std::min(start + batch_size, n);
            std::span<const std::size_t> rows(order.data() + start, stop - start);
            const double loss = cnn_train_step(model, train, labels, rows,
                                               config.learning_rate, grads);
            if (!std::isfinite(loss)) {
                throw DivergenceError("CNN training diverged at epoch " +
                                      std::to_string(epoch));
            }
            epoch_loss += loss * static_cast<double>(rows.size());
        }
        EpochRecord rec;
        rec.epoch = epoch + 1;
        rec.loss = epoch_loss / static_cast<double>(n);
        rec.accuracy = cnn_accuracy(model, train, labels);
        if (val != nullptr && val->rows > 0) {
            rec.val_accuracy = cnn_accuracy(model, *val, val_labels);
            rec.has_val = true;
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - e0).count();
        history.epochs.push_back(rec);
    }
    history.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(model), std::move(history)};
}

/// Worst relative error between analytic and central-finite-difference
/// gradients over every trainable parameter (the pad embedding row is a
/// pinned constant and is skipped). Error metric:
/// |a - n| / max(|a| + |n|, 1e-3).
inline double gradient_check(const CnnModel& model, const SequenceBatch& batch,
                             std::span<const Label> labels, double step = 1e-4) {
    CnnGradients analytic;
    cnn_loss_grad(model, batch, labels, {}, &analytic);

    CnnModel probe = model;
    double worst = 0.0;
    auto check_group = [&](std::vector<double>& params, const std::vector<double>& grad,
                           std::size_t skip_begin, std::size_t skip_end) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i >= skip_begin && i < skip_end) continue;
            const double saved = params[i];
            params[i] = saved + step;
            const double up = cnn_loss(probe, batch, labels);
            params[i] = saved - step;
            const double down = cnn_loss(probe, batch, labels);
            params[i] = saved;
            const double numeric = (up - down) / (2.0 * step);
            const double err = std::abs(grad[i] - numeric) /
                               std::max(std::abs(grad[i]) + std::abs(numeric), 1e-3);
            worst = std::max(worst, err);
        }
    };
    const auto d = static_cast<std::size_t>(model.embed_dim);
    check_group(probe.embedding, analytic.embedding, 0, d); // skip the pad row
    check_group(probe.conv_w, analytic.conv_w, 1, 0);
    check_group(probe.conv_b, analytic.conv_b, 1, 0);
    check_group(probe.dense_w, analytic.dense_w, 1, 0);
    check_group(probe.dense_b, analytic.dense_b, 1, 0);
    return worst;
}

} // namespace emoforge

#endif // EMOFORGE_NEURAL_HPP
