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

#ifndef EMOFORGE_SPARSE_HPP
#define EMOFORGE_SPARSE_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "emoforge/errors.hpp"

namespace emoforge {

/// Sorted (index, weight) pairs over the selected feature space. Indices are
/// strictly increasing; absent indices read as 0.
struct SparseVector {
    std::vector<std::pair<std::uint32_t, double>> entries;

    std::size_t nnz() const { return entries.size(); }
    bool empty() const { return entries.empty(); }

    double at(std::uint32_t index) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), index,
                                   [](const auto& e, std::uint32_t i) { return e.first < i; });
        return (it != entries.end() && it->first == index) ? it->second : 0.0;
    }

    /// Largest index + 1, i.e. the smallest dense width holding this vector.
    std::uint32_t min_width() const {
        return entries.empty() ? 0 : entries.back().first + 1;
    }
};

/// Build a SparseVector from unordered pairs; sorts and rejects duplicates.
inline SparseVector make_sparse(std::vector<std::pair<std::uint32_t, double>> pairs) {
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < pairs.size(); ++i) {
        if (pairs[i].first == pairs[i - 1].first) {
            throw ShapeError("duplicate sparse index " + std::to_string(pairs[i].first));
        }
    }
    return SparseVector{std::move(pairs)};
}

inline double dot(const SparseVector& v, std::span<const double> dense) {
    double acc = 0.0;
    for (const auto& [i, w] : v.entries) acc += dense[i] * w;
    return acc;
}

inline double dot(const SparseVector& a, const SparseVector& b) {
    double acc = 0.0;
    auto ia = a.entries.begin();
    auto ib = b.entries.begin();
    while (ia != a.entries.end() && ib != b.entries.end()) {
        if (ia->first < ib->first) ++ia;
        else if (ib->first < ia->first) ++ib;
        else {
            acc += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    return acc;
}

inline double squared_norm(const SparseVector& v) {
    double acc = 0.0;
    for (const auto& [i, w] : v.entries) acc += w * w;
    return acc;
}

inline double squared_distance(const SparseVector& a, const SparseVector& b) {
    double acc = 0.0;
    auto ia = a.entries.begin();
    auto ib = b.entries.begin();
    while (ia != a.entries.end() || ib != b.entries.end()) {
        if (ib == b.entries.end() || (ia != a.entries.end() && ia->first < ib->first)) {
            acc += ia->second * ia->second;
            ++ia;
        } else if (ia == a.entries.end() || ib->first < ia->first) {
            acc += ib->second * ib->second;
            ++ib;
        } else {
            const double d = ia->second - ib->second;
            acc += d * d;
            ++ia;
            ++ib;
        }
    }
    return acc;
}

/// Widest index + 1 across a dataset; 0 for an all-empty set.
inline std::uint32_t infer_width(std::span<const SparseVector> data) {
    std::uint32_t width = 0;
    for (const auto& v : data) width = std::max(width, v.min_width());
    return width;
}

} // namespace emoforge

#endif // EMOFORGE_SPARSE_HPP
