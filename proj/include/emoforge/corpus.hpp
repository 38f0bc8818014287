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

#ifndef EMOFORGE_CORPUS_HPP
#define EMOFORGE_CORPUS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emoforge/errors.hpp"
#include "emoforge/label.hpp"
#include "emoforge/rng.hpp"

namespace emoforge {

/// One text sample with its emotion label; the unit of every dataset.
struct LabeledDocument {
    std::int64_t id = 0;
    std::string text;
    Label label = Label::positive;
};

struct ClassDistribution {
    std::array<std::int64_t, kNumLabels> counts{};
    std::int64_t total = 0;

    std::int64_t count(Label l) const { return counts[static_cast<std::size_t>(label_code(l))]; }
};

struct DatasetSplit {
    std::vector<LabeledDocument> train;
    std::vector<LabeledDocument> test;
    std::uint64_t seed = 0;
    double train_fraction = 0.7;
};

enum class CorpusFormat { csv, tsv };

inline ClassDistribution class_distribution(std::span<const LabeledDocument> docs) {
    ClassDistribution dist;
    for (const auto& d : docs) {
        ++dist.counts[static_cast<std::size_t>(label_code(d.label))];
        ++dist.total;
    }
    return dist;
}

inline nlohmann::json distribution_json(const ClassDistribution& dist) {
    nlohmann::json counts;
    for (Label l : kAllLabels) counts[label_name(l)] = dist.count(l);
    return nlohmann::json{{"counts", counts}, {"total", dist.total}};
}

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

/// One RFC 4180 record: fields may be quoted, quotes escape as "", quoted
/// fields may span lines. Returns false at end of input. `line` tracks the
/// 1-based line the next record starts on.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields,
                            std::size_t& line, std::size_t& record_start_line) {
    fields.clear();
    int c = in.get();
    if (c == EOF) return false;
    record_start_line = line;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    while (true) {
        if (c == EOF) {
            fields.push_back(field);
            return true;
        }
        any = true;
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                int peek = in.peek();
                if (peek == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
        } else if (ch == '"' && field.empty()) {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch == '\r') {
            // swallow; \r\n handled at \n
        } else if (ch == '\n') {
            ++line;
            fields.push_back(field);
            return true;
        } else {
            field.push_back(ch);
        }
        c = in.get();
    }
    (void)any;
}

/// TSV record: plain tab-split, no quoting, no embedded tabs or newlines.
inline bool read_tsv_record(std::istream& in, std::vector<std::string>& fields,
                            std::size_t& line, std::size_t& record_start_line) {
    std::string raw;
    if (!std::getline(in, raw)) return false;
    record_start_line = line;
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    fields.clear();
    std::size_t start = 0;
    while (true) {
        std::size_t tab = raw.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(raw.substr(start));
            break;
        }
        fields.push_back(raw.substr(start, tab - start));
        start = tab + 1;
    }
    return true;
}

inline bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

inline std::string csv_quote(std::string_view field) {
    bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace detail

/// Load a labeled corpus from CSV (RFC 4180) or TSV. The header row names a
/// `text` and a `label` column (any order, matched case-insensitively by
/// name); extra columns are ignored. Documents get sequential ids from 0 in
/// file order.
inline std::vector<LabeledDocument> load_corpus(const std::filesystem::path& path,
                                                CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path.string());

    auto read_record = format == CorpusFormat::csv ? detail::read_csv_record
                                                   : detail::read_tsv_record;

    std::vector<std::string> fields;
    std::size_t line = 1, record_line = 1;
    if (!read_record(in, fields, line, record_line)) {
        throw ParseError("empty corpus file: " + path.string());
    }

    std::size_t text_col = fields.size(), label_col = fields.size();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string name = detail::trim(fields[i]);
        if (detail::iequals(name, "text")) text_col = i;
        else if (detail::iequals(name, "label")) label_col = i;
    }
    if (text_col >= fields.size() || label_col >= fields.size()) {
        throw ParseError("header must name text and label columns, got \"" +
                         std::string(fields.empty() ? "" : fields[0]) + "...\" in " +
                         path.string());
    }
    const std::size_t n_cols = fields.size();

    std::vector<LabeledDocument> docs;
    std::int64_t next_id = 0;
    while (read_record(in, fields, line, record_line)) {
        if (fields.size() == 1 && fields[0].empty()) continue; // trailing blank line
        if (fields.size() != n_cols) {
            throw ParseError("malformed row at line " + std::to_string(record_line) +
                             ": expected " + std::to_string(n_cols) + " columns, got " +
                             std::to_string(fields.size()));
        }
        const std::string label_raw = detail::trim(fields[label_col]);
        auto label = try_parse_label(label_raw);
        if (!label) {
            throw LabelError("unknown label \"" + label_raw + "\" at line " +
                             std::to_string(record_line));
        }
        std::string text = fields[text_col];
        if (detail::trim(text).empty()) {
            throw ParseError("empty text in row " + std::to_string(next_id) +
                             " (line " + std::to_string(record_line) + ")");
        }
        docs.push_back({next_id++, std::move(text), *label});
    }
    return docs;
}

/// Write a corpus back out with a `text,label` header. CSV quoting follows
/// RFC 4180; TSV refuses fields containing tabs or newlines.
inline void write_corpus(std::span<const LabeledDocument> docs,
                         const std::filesystem::path& path,
                         CorpusFormat format = CorpusFormat::csv) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write corpus file: " + path.string());
    if (format == CorpusFormat::csv) {
        out << "text,label\n";
        for (const auto& d : docs) {
            out << detail::csv_quote(d.text) << ',' << label_name(d.label) << '\n';
        }
    } else {
        out << "text\tlabel\n";
        for (const auto& d : docs) {
            if (d.text.find_first_of("\t\r\n") != std::string::npos) {
                throw ParseError("TSV output forbids embedded tabs/newlines (doc " +
                                 std::to_string(d.id) + ")");
            }
            out << d.text << '\t' << label_name(d.label) << '\n';
        }
    }
}

/// Largest-remainder allocation: given per-class counts, return per-class
/// shares of floor(fraction * total). Each class gets floor(fraction * n_c);
/// leftovers go one each to classes in descending fractional-remainder
/// order, ties broken by ascending class index.
inline std::vector<std::int64_t> largest_remainder_allocation(
        std::span<const std::int64_t> counts, double fraction) {
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    const auto target = static_cast<std::int64_t>(
        std::floor(fraction * static_cast<double>(total)));

    std::vector<std::int64_t> shares(counts.size());
    std::vector<std::pair<double, std::size_t>> remainders; // (-remainder, index)
    std::int64_t allocated = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double exact = fraction * static_cast<double>(counts[i]);
        shares[i] = static_cast<std::int64_t>(std::floor(exact));
        allocated += shares[i];
        remainders.emplace_back(-(exact - static_cast<double>(shares[i])), i);
    }
    std::sort(remainders.begin(), remainders.end());
    std::int64_t extras = target - allocated;
    for (std::size_t i = 0; extras > 0; i = (i + 1) % remainders.size()) {
        const std::size_t cls = remainders[i].second;
        if (shares[cls] >= counts[cls]) continue; // class already exhausted
        ++shares[cls];
        --extras;
    }
    return shares;
}

/// Scale a class distribution to a new total, preserving proportions by
/// largest remainder (exactly new_total documents come back).
inline std::array<std::int64_t, kNumLabels> scale_distribution(
        const ClassDistribution& dist, std::int64_t new_total) {
    const double fraction = dist.total == 0
        ? 0.0
        : static_cast<double>(new_total) / static_cast<double>(dist.total);
    auto shares = largest_remainder_allocation(
        std::span<const std::int64_t>(dist.counts.data(), dist.counts.size()), fraction);
    std::array<std::int64_t, kNumLabels> out{};
    for (int i = 0; i < kNumLabels; ++i) out[static_cast<std::size_t>(i)] = shares[static_cast<std::size_t>(i)];
    return out;
}

/// Stratified 70/30-style split. Per class c the train side receives
/// floor(fraction * n_c) documents plus at most one extra, assigned in
/// descending fractional-remainder order until the global train count equals
/// floor(fraction * N). Membership within a class is a seeded shuffle of the
/// class's ids (sorted first, so the result does not depend on input order).
inline DatasetSplit stratified_split(const std::vector<LabeledDocument>& docs,
                                     double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw SplitError("train_fraction must lie in (0,1), got " +
                         std::to_string(train_fraction));
    }

    std::array<std::vector<std::size_t>, kNumLabels> by_class;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        by_class[static_cast<std::size_t>(label_code(docs[i].label))].push_back(i);
    }

    std::array<std::int64_t, kNumLabels> counts{};
    for (int c = 0; c < kNumLabels; ++c) {
        const auto& members = by_class[static_cast<std::size_t>(c)];
        if (!members.empty() && members.size() < 2) {
            throw SplitError(std::string("class ") + label_name(label_from_code(c)) +
                             " has fewer than 2 documents");
        }
        counts[static_cast<std::size_t>(c)] = static_cast<std::int64_t>(members.size());
    }

    const auto train_targets = largest_remainder_allocation(
        std::span<const std::int64_t>(counts.data(), counts.size()), train_fraction);

    DatasetSplit split;
    split.seed = seed;
    split.train_fraction = train_fraction;
    std::vector<char> in_train(docs.size(), 0);
    for (int c = 0; c < kNumLabels; ++c) {
        auto members = by_class[static_cast<std::size_t>(c)];
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            return docs[a].id < docs[b].id;
        });
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(c)));
        rng.shuffle(members);
        const auto take = static_cast<std::size_t>(train_targets[static_cast<std::size_t>(c)]);
        for (std::size_t i = 0; i < take; ++i) in_train[members[i]] = 1;
    }
    for (std::size_t i = 0; i < docs.size(); ++i) {
        (in_train[i] ? split.train : split.test).push_back(docs[i]);
    }
    return split;
}

/// Recipe for a seeded synthetic corpus: per-class document counts, per-class
/// vocabulary banks, a shared bank mixed in with probability `overlap`, and a
/// uniform token-count range per document.
struct SyntheticSpec {
    std::array<std::int64_t, kNumLabels> counts{};
    std::array<std::vector<std::string>, kNumLabels> banks{};
    std::vector<std::string> shared_bank{};
    double overlap = 0.0;
    int min_tokens = 3;
    int max_tokens = 8;
};

inline std::vector<LabeledDocument> generate_synthetic_corpus(const SyntheticSpec& spec,
                                                              std::uint64_t seed) {
    for (int c = 0; c < kNumLabels; ++c) {
        if (spec.counts[static_cast<std::size_t>(c)] > 0 && spec.banks[static_cast<std::size_t>(c)].empty()) {
            throw ConfigError(std::string("empty vocabulary bank for class ") +
                              label_name(label_from_code(c)) + " with nonzero count");
        }
    }
    if (spec.overlap > 0.0 && spec.shared_bank.empty()) {
        throw ConfigError("overlap > 0 requires a non-empty shared bank");
    }
    if (spec.min_tokens < 1 || spec.max_tokens < spec.min_tokens) {
        throw ConfigError("invalid token count range");
    }

    Rng rng(seed);
    std::vector<LabeledDocument> docs;
    std::int64_t next_id = 0;
    for (int c = 0; c < kNumLabels; ++c) {
        const auto& bank = spec.banks[static_cast<std::size_t>(c)];
        for (std::int64_t n = 0; n < spec.counts[static_cast<std::size_t>(c)]; ++n) {
            const int len = rng.uniform_int(spec.min_tokens, spec.max_tokens);
            std::string text;
            for (int t = 0; t < len; ++t) {
                const bool shared = spec.overlap > 0.0 && rng.uniform() < spec.overlap;
                const auto& source = shared ? spec.shared_bank : bank;
                if (t > 0) text.push_back(' ');
                text += source[static_cast<std::size_t>(rng.below(source.size()))];
            }
            docs.push_back({next_id++, std::move(text), label_from_code(c)});
        }
    }
    return docs;
}

} // namespace emoforge

#endif // EMOFORGE_CORPUS_HPP
