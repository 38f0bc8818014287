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

#ifndef EMOFORGE_METRICS_HPP
#define EMOFORGE_METRICS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>

#include <json.hpp>

#include "emoforge/errors.hpp"
#include "emoforge/label.hpp"

namespace emoforge {

/// 3x3 tally; rows are true labels, columns are predicted labels.
struct ConfusionMatrix {
    std::array<std::array<std::int64_t, kNumLabels>, kNumLabels> counts{};
    std::int64_t total = 0;

    std::int64_t row_sum(int r) const {
        std::int64_t s = 0;
        for (int c = 0; c < kNumLabels; ++c) s += counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        return s;
    }
    std::int64_t col_sum(int c) const {
        std::int64_t s = 0;
        for (int r = 0; r < kNumLabels; ++r) s += counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        return s;
    }
    std::int64_t trace() const {
        std::int64_t s = 0;
        for (int i = 0; i < kNumLabels; ++i) s += counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        return s;
    }
};

inline ConfusionMatrix confusion(std::span<const Label> y_true, std::span<const Label> y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw ShapeError("confusion: " + std::to_string(y_true.size()) + " truths vs " +
                         std::to_string(y_pred.size()) + " predictions");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        ++cm.counts[static_cast<std::size_t>(label_code(y_true[i]))]
                   [static_cast<std::size_t>(label_code(y_pred[i]))];
        ++cm.total;
    }
    return cm;
}

struct PerClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Accuracy plus support-weighted precision/recall/F-score. With support
/// weighting, weighted recall equals accuracy identically.
struct MetricsReport {
    double accuracy = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
    std::array<PerClassMetrics, kNumLabels> per_class{};
};

/// Per-class precision = diag/col-sum, recall = diag/row-sum, F1 = harmonic
/// mean; every zero denominator yields 0. Weighted metric
/// = sum_c (row_sum_c / total) * metric_c.
inline MetricsReport weighted_report(const ConfusionMatrix& cm) {
    if (cm.total <= 0) throw ShapeError("weighted_report: empty confusion matrix");
    MetricsReport rep;
    const double total = static_cast<double>(cm.total);
    rep.accuracy = static_cast<double>(cm.trace()) / total;
    for (int c = 0; c < kNumLabels; ++c) {
        const auto diag = cm.counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
        const auto col = cm.col_sum(c);
        const auto row = cm.row_sum(c);
        PerClassMetrics m;
        m.precision = col > 0 ? static_cast<double>(diag) / static_cast<double>(col) : 0.0;
        m.recall = row > 0 ? static_cast<double>(diag) / static_cast<double>(row) : 0.0;
        m.f1 = (m.precision + m.recall) > 0.0
            ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
            : 0.0;
        rep.per_class[static_cast<std::size_t>(c)] = m;
        const double weight = static_cast<double>(row) / total;
        rep.weighted_precision += weight * m.precision;
        rep.weighted_recall += weight * m.recall;
        rep.weighted_f1 += weight * m.f1;
    }
    return rep;
}

/// Percentage with one decimal, rounding half away from zero: 0.47590 ->
/// "47.6". Integer formatting after the rounding step keeps bytes exact.
inline std::string format_percent(double fraction) {
    const long long tenths = std::llround(fraction * 1000.0);
    std::string s = std::to_string(tenths / 10);
    s.push_back('.');
    s += std::to_string(std::llabs(tenths % 10));
    return s;
}

inline nlohmann::json report_json(const MetricsReport& rep) {
    nlohmann::json per_class;
    for (Label l : kAllLabels) {
        const auto& m = rep.per_class[static_cast<std::size_t>(label_code(l))];
        per_class[label_name(l)] = {
            {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
    }
    return nlohmann::json{
        {"accuracy", rep.accuracy},
        {"weighted_precision", rep.weighted_precision},
        {"weighted_recall", rep.weighted_recall},
        {"weighted_f1", rep.weighted_f1},
        {"per_class", std::move(per_class)},
    };
}

/// One results.csv row in the grid's `features,classifier,...` layout.
inline std::string report_csv_row(int features, const std::string& classifier,
                                  const MetricsReport& rep) {
    return std::to_string(features) + "," + classifier + "," +
           format_percent(rep.accuracy) + "," + format_percent(rep.weighted_precision) + "," +
           format_percent(rep.weighted_recall) + "," + format_percent(rep.weighted_f1);
}

} // namespace emoforge

#endif // EMOFORGE_METRICS_HPP
