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

#ifndef EMOFORGE_TAGCLOUD_HPP
#define EMOFORGE_TAGCLOUD_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "emoforge/errors.hpp"
#include "emoforge/textprep.hpp"

namespace emoforge {

struct CloudParams {
    int max_words = 50;
    int min_freq = 2;
    bool lowercase = true;
    std::set<std::string> exclude; // the "don't show words" list
    bool group_similar = false;
};

struct CloudEntry {
    std::string word;
    std::int64_t frequency = 0;
    int size_bucket = 1; // 1..5, by frequency quintile within the cloud
};

/// Suffix-stripping stem used by group_similar: drop one trailing "ing",
/// "ed" or "s" when at least 3 characters remain, then reduce a doubled
/// trailing consonant ("running" -> "runn" -> "run").
inline std::string stem_word(const std::string& word) {
    std::string s = word;
    auto ends_with = [&](std::string_view suffix) {
        return s.size() > suffix.size() &&
               s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    bool stripped = false;
    for (std::string_view suffix : {"ing", "ed", "s"}) {
        if (ends_with(suffix) && s.size() - suffix.size() >= 3) {
            s.resize(s.size() - suffix.size());
            stripped = true;
            break;
        }
    }
    if (stripped && s.size() >= 4 && s[s.size() - 1] == s[s.size() - 2] &&
        !std::strchr("aeiou", s.back())) {
        s.pop_back();
    }
    return s;
}

/// Count token frequencies over documents of one label, apply the TagCrowd
/// parameters, and bucket by quintile. Entries come back sorted by frequency
/// descending, ties lexicographic.
inline std::vector<CloudEntry> build_cloud(std::span<const TokenizedDocument> docs,
                                           const CloudParams& params) {
    if (docs.empty()) throw CloudError("cannot build a tag cloud from zero documents");
    if (params.max_words < 1) throw ConfigError("max_words must be >= 1");
    if (params.min_freq < 1) throw ConfigError("min_freq must be >= 1");

    std::map<std::string, std::int64_t> freq;
    for (const auto& doc : docs) {
        for (const auto& token : doc.tokens) {
            std::string word = token;
            if (params.lowercase) {
                for (auto& c : word) {
                    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                }
            }
            if (params.exclude.contains(word)) continue;
            ++freq[word];
        }
    }

    if (params.group_similar) {
        // Merge words sharing a stem under the shortest surface form.
        std::map<std::string, std::pair<std::string, std::int64_t>> groups; // stem -> (surface, count)
        for (const auto& [word, count] : freq) {
            const std::string stem = stem_word(word);
            auto it = groups.find(stem);
            if (it == groups.end()) {
                groups.emplace(stem, std::make_pair(word, count));
            } else {
                it->second.second += count;
                auto& surface = it->second.first;
                if (word.size() < surface.size() ||
                    (word.size() == surface.size() && word < surface)) {
                    surface = word;
                }
            }
        }
        freq.clear();
        for (const auto& [stem, entry] : groups) freq[entry.first] += entry.second;
    }

    std::vector<CloudEntry> entries;
    for (const auto& [word, count] : freq) {
        if (count >= params.min_freq) entries.push_back({word, count, 1});
    }
    std::sort(entries.begin(), entries.end(), [](const CloudEntry& a, const CloudEntry& b) {
        if (a.frequency != b.frequency) return a.frequency > b.frequency;
        return a.word < b.word;
    });
    if (entries.size() > static_cast<std::size_t>(params.max_words)) {
        entries.resize(static_cast<std::size_t>(params.max_words));
    }

    // Quintile buckets: 1 + floor(5 * rank_below / n), equal frequencies
    // share a bucket.
    const auto n = static_cast<std::int64_t>(entries.size());
    for (auto& e : entries) {
        std::int64_t below = 0;
        for (const auto& other : entries) below += other.frequency < e.frequency ? 1 : 0;
        e.size_bucket = static_cast<int>(1 + (5 * below) / std::max<std::int64_t>(n, 1));
        e.size_bucket = std::min(e.size_bucket, 5);
    }
    return entries;
}

enum class CloudFormat { text, html };

namespace detail {

inline std::string html_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

} // namespace detail

/// Text: one `word (freq)` line per entry, alphabetical. HTML: a single
/// self-contained page; each word is a span classed by its size bucket.
inline std::string render_cloud(std::span<const CloudEntry> entries, CloudFormat format) {
    std::vector<CloudEntry> sorted(entries.begin(), entries.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const CloudEntry& a, const CloudEntry& b) { return a.word < b.word; });

    if (format == CloudFormat::text) {
        std::string out;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (i > 0) out.push_back('\n');
            out += sorted[i].word + " (" + std::to_string(sorted[i].frequency) + ")";
        }
        return out;
    }

    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
        << "<title>tag cloud</title>\n<style>\n"
        << "body { font-family: sans-serif; margin: 2em; }\n"
        << ".cloud span { margin: 0 0.3em; }\n"
        << ".w1 { font-size: 12px; color: #8a8a8a; }\n"
        << ".w2 { font-size: 16px; color: #5c7a99; }\n"
        << ".w3 { font-size: 21px; color: #3a6ea5; }\n"
        << ".w4 { font-size: 27px; color: #1f4e79; }\n"
        << ".w5 { font-size: 34px; color: #0b2e4f; }\n"
        << "</style>\n</head>\n<body>\n<div class=\"cloud\">\n";
    for (const auto& e : sorted) {
        out << "<span class=\"w" << e.size_bucket << "\" title=\"" << e.frequency << "\">"
            << detail::html_escape(e.word) << "</span>\n";
    }
    out << "</div>\n</body>\n</html>\n";
    return out.str();
}

} // namespace emoforge

#endif // EMOFORGE_TAGCLOUD_HPP
