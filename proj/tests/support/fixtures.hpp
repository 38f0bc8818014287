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

#ifndef EMOFORGE_TESTS_FIXTURES_HPP
#define EMOFORGE_TESTS_FIXTURES_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "emoforge/corpus.hpp"
#include "emoforge/label.hpp"
#include "emoforge/rng.hpp"
#include "emoforge/sparse.hpp"
#include "emoforge/textprep.hpp"

namespace emoforge::testing {

/// The paper-reported corpus mix: 62629 positive, 55477 negative, 13495
/// neutral, 131601 total.
inline ClassDistribution reference_distribution() {
    ClassDistribution dist;
    dist.counts = {62629, 55477, 13495};
    dist.total = 131601;
    return dist;
}

inline std::vector<std::string> word_bank(const std::string& prefix, int n) {
    std::vector<std::string> bank;
    bank.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) bank.push_back(prefix + std::to_string(i));
    return bank;
}

/// Per-class disjoint vocabularies; linearly separable by construction.
inline SyntheticSpec separable_spec(std::array<std::int64_t, 3> counts, int words_per_class = 12,
                                    int min_tokens = 5, int max_tokens = 12) {
    SyntheticSpec spec;
    spec.counts = counts;
    spec.banks = {word_bank("happy", words_per_class), word_bank("awful", words_per_class),
                  word_bank("plain", words_per_class)};
    spec.min_tokens = min_tokens;
    spec.max_tokens = max_tokens;
    return spec;
}

inline TokenizedDocument tok_doc(std::int64_t id, std::vector<Token> tokens,
                                 Label label = Label::positive) {
    return {id, std::move(tokens), label};
}

inline SparseVector sv(std::vector<std::pair<std::uint32_t, double>> pairs) {
    return make_sparse(std::move(pairs));
}

/// Random sparse dataset for gradient / oracle exercises.
inline std::vector<SparseVector> random_sparse(Rng& rng, std::size_t n, int width,
                                               double density = 0.6, double lo = -2.0,
                                               double hi = 2.0) {
    std::vector<SparseVector> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<std::uint32_t, double>> pairs;
        for (int f = 0; f < width; ++f) {
            if (rng.uniform() < density) {
                pairs.emplace_back(static_cast<std::uint32_t>(f), rng.uniform(lo, hi));
            }
        }
        out.push_back(make_sparse(std::move(pairs)));
    }
    return out;
}

inline std::vector<Label> random_labels(Rng& rng, std::size_t n) {
    std::vector<Label> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(label_from_code(static_cast<int>(rng.below(3))));
    }
    return out;
}

/// Unique temp directory under the system temp root; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("emoforge_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

} // namespace emoforge::testing

#endif // EMOFORGE_TESTS_FIXTURES_HPP
