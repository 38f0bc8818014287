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

#ifndef EMOFORGE_VECTORIZER_HPP
#define EMOFORGE_VECTORIZER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "emoforge/errors.hpp"
#include "emoforge/sparse.hpp"
#include "emoforge/textprep.hpp"

namespace emoforge {

struct TfidfConfig {
    int min_df = 1;
    double max_df = 1.0;
    int max_features = std::numeric_limits<int>::max();
};

/// Term -> dense feature index plus per-term document frequencies. Indices
/// run 0..V-1 in descending-df-then-lexicographic order.
struct Vocabulary {
    std::vector<std::string> terms;                            // index -> term
    std::vector<std::int64_t> df;                              // index -> document frequency
    std::unordered_map<std::string, std::uint32_t> term_to_index;
    std::int64_t total_docs = 0;                               // D

    std::size_t size() const { return terms.size(); }
};

/// Integer-coded documents for the embedding path. Code 0 is padding, code 1
/// is out-of-vocabulary; vocabulary indices start at code 2.
struct SequenceBatch {
    static constexpr std::int32_t kPad = 0;
    static constexpr std::int32_t kOov = 1;

    std::vector<std::int32_t> codes; // row-major, rows x max_len
    std::size_t rows = 0;
    int max_len = 0;

    std::span<const std::int32_t> row(std::size_t r) const {
        return {codes.data() + r * static_cast<std::size_t>(max_len),
                static_cast<std::size_t>(max_len)};
    }
};

/// Fitted TF-IDF vectorizer. IDF is always recomputed from (D, df) with the
/// natural log, so the formula has a single home.
class TfidfModel {
public:
    TfidfModel() = default;

    /// Fit on training documents. df counts distinct-term presence per
    /// document; terms failing min_df/max_df are dropped; if more than
    /// max_features survive, the highest-df terms win (ties by ascending
    /// lexicographic order).
    static TfidfModel fit(std::span<const TokenizedDocument> train_docs,
                          const TfidfConfig& config) {
        if (train_docs.empty()) throw FitError("cannot fit TF-IDF on an empty corpus");
        if (config.min_df < 1) throw ConfigError("min_df must be >= 1");
        if (!(config.max_df > 0.0 && config.max_df <= 1.0)) {
            throw ConfigError("max_df must lie in (0,1]");
        }
        if (config.max_features < 1) throw ConfigError("max_features must be >= 1");

        const auto D = static_cast<std::int64_t>(train_docs.size());
        std::unordered_map<std::string, std::int64_t> df_count;
        std::unordered_set<std::string_view> seen;
        for (const auto& doc : train_docs) {
            seen.clear();
            for (const auto& tok : doc.tokens) {
                if (seen.insert(tok).second) ++df_count[tok];
            }
        }

        std::vector<std::pair<std::string, std::int64_t>> kept;
        for (auto& [term, df] : df_count) {
            const double ratio = static_cast<double>(df) / static_cast<double>(D);
            if (df >= config.min_df && ratio <= config.max_df) {
                kept.emplace_back(term, df);
            }
        }
        if (kept.empty()) {
            throw FitError("no terms survive filtering (min_df=" +
                           std::to_string(config.min_df) +
                           ", max_df=" + std::to_string(config.max_df) + ")");
        }
        std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second; // df descending
            return a.first < b.first;                             // term ascending
        });
        if (static_cast<std::int64_t>(kept.size()) > config.max_features) {
            kept.resize(static_cast<std::size_t>(config.max_features));
        }

        TfidfModel model;
        model.config_ = config;
        model.vocab_.total_docs = D;
        model.vocab_.terms.reserve(kept.size());
        model.vocab_.df.reserve(kept.size());
        for (std::uint32_t i = 0; i < kept.size(); ++i) {
            model.vocab_.terms.push_back(kept[i].first);
            model.vocab_.df.push_back(kept[i].second);
            model.vocab_.term_to_index.emplace(kept[i].first, i);
        }
        model.recompute_idf();
        return model;
    }

    /// TF-IDF weights for one document: raw in-document count times IDF.
    /// Out-of-vocabulary terms are skipped; no normalization.
    SparseVector transform(std::span<const Token> tokens) const {
        std::map<std::uint32_t, std::int64_t> tf; // ordered -> sorted output
        for (const auto& tok : tokens) {
            auto it = vocab_.term_to_index.find(tok);
            if (it != vocab_.term_to_index.end()) ++tf[it->second];
        }
        SparseVector v;
        v.entries.reserve(tf.size());
        for (const auto& [index, count] : tf) {
            v.entries.emplace_back(index, static_cast<double>(count) * idf_[index]);
        }
        return v;
    }

    SparseVector transform(const TokenizedDocument& doc) const {
        return transform(std::span<const Token>(doc.tokens));
    }

    std::vector<SparseVector> transform_all(std::span<const TokenizedDocument> docs) const {
        std::vector<SparseVector> out;
        out.reserve(docs.size());
        for (const auto& d : docs) out.push_back(transform(d));
        return out;
    }

    /// Integer codes for the embedding path: vocabulary index + 2, OOV -> 1,
    /// right-padded with 0, truncated at max_len.
    std::vector<std::int32_t> encode_sequence(std::span<const Token> tokens, int max_len) const {
        if (max_len < 1) throw ConfigError("max_len must be >= 1");
        std::vector<std::int32_t> row(static_cast<std::size_t>(max_len), SequenceBatch::kPad);
        const std::size_t n = std::min(tokens.size(), static_cast<std::size_t>(max_len));
        for (std::size_t i = 0; i < n; ++i) {
            auto it = vocab_.term_to_index.find(tokens[i]);
            row[i] = it == vocab_.term_to_index.end()
                ? SequenceBatch::kOov
                : static_cast<std::int32_t>(it->second) + 2;
        }
        return row;
    }

    SequenceBatch encode_sequences(std::span<const TokenizedDocument> docs, int max_len) const {
        SequenceBatch batch;
        batch.rows = docs.size();
        batch.max_len = max_len;
        batch.codes.reserve(docs.size() * static_cast<std::size_t>(max_len));
        for (const auto& d : docs) {
            auto row = encode_sequence(d.tokens, max_len);
            batch.codes.insert(batch.codes.end(), row.begin(), row.end());
        }
        return batch;
    }

    std::size_t vocab_size() const { return vocab_.size(); }
    const Vocabulary& vocabulary() const { return vocab_; }
    const TfidfConfig& config() const { return config_; }
    double idf(std::uint32_t index) const { return idf_[index]; }
    const std::vector<double>& idf_values() const { return idf_; }

    nlohmann::json to_json() const {
        nlohmann::json terms = nlohmann::json::array();
        for (std::uint32_t i = 0; i < vocab_.size(); ++i) {
            terms.push_back({{"t", vocab_.terms[i]}, {"df", vocab_.df[i]}, {"idx", i}});
        }
        return nlohmann::json{
            {"version", 1},
            {"D", vocab_.total_docs},
            {"min_df", config_.min_df},
            {"max_df", config_.max_df},
            {"max_features", config_.max_features},
            {"terms", std::move(terms)},
        };
    }

    static TfidfModel from_json(const nlohmann::json& j) {
        if (!j.is_object() || !j.contains("version")) {
            throw FormatError("not a TF-IDF model document");
        }
        const int version = j.at("version").get<int>();
        if (version != 1) {
            throw VersionError("unsupported TF-IDF model version " + std::to_string(version));
        }
        TfidfModel model;
        model.vocab_.total_docs = j.at("D").get<std::int64_t>();
        model.config_.min_df = j.at("min_df").get<int>();
        model.config_.max_df = j.at("max_df").get<double>();
        model.config_.max_features = j.at("max_features").get<int>();
        const auto& terms = j.at("terms");
        model.vocab_.terms.resize(terms.size());
        model.vocab_.df.resize(terms.size());
        for (const auto& t : terms) {
            const auto idx = t.at("idx").get<std::uint32_t>();
            if (idx >= terms.size()) throw ParseError("term index out of range in model");
            model.vocab_.terms[idx] = t.at("t").get<std::string>();
            model.vocab_.df[idx] = t.at("df").get<std::int64_t>();
        }
        for (std::uint32_t i = 0; i < model.vocab_.terms.size(); ++i) {
            model.vocab_.term_to_index.emplace(model.vocab_.terms[i], i);
        }
        model.recompute_idf();
        return model;
    }

private:
    void recompute_idf() {
        idf_.resize(vocab_.size());
        for (std::uint32_t i = 0; i < vocab_.size(); ++i) {
            idf_[i] = std::log(static_cast<double>(vocab_.total_docs) /
                               static_cast<double>(vocab_.df[i]));
        }
    }

    Vocabulary vocab_;
    std::vector<double> idf_;
    TfidfConfig config_;
};

} // namespace emoforge

#endif // EMOFORGE_VECTORIZER_HPP
