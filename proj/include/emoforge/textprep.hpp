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

#ifndef EMOFORGE_TEXTPREP_HPP
#define EMOFORGE_TEXTPREP_HPP

#include <cctype>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emoforge/corpus.hpp"
#include "emoforge/label.hpp"

namespace emoforge {

using Token = std::string;

/// A document reduced to its ordered token stream.
struct TokenizedDocument {
    std::int64_t id = 0;
    std::vector<Token> tokens;
    Label label = Label::positive;
};

namespace detail {

inline bool is_ascii_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool is_word_char(unsigned char c) { return is_ascii_alnum(c) || c == '_'; }

/// Detects `scheme://` starting at position i; returns the end of the URL
/// (first whitespace) or std::string_view::npos when there is no URL here.
inline std::size_t url_end(std::string_view s, std::size_t i) {
    if (!std::isalpha(static_cast<unsigned char>(s[i]))) return std::string_view::npos;
    std::size_t j = i;
    while (j < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[j]);
        if (is_ascii_alnum(c) || c == '+' || c == '.' || c == '-') {
            ++j;
        } else {
            break;
        }
    }
    if (j + 2 >= s.size() || s[j] != ':' || s[j + 1] != '/' || s[j + 2] != '/') {
        return std::string_view::npos;
    }
    j += 3;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    return j;
}

inline std::string normalize_pass(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::size_t end = detail::url_end(text, i); end != std::string_view::npos) {
            i = end;
            continue;
        }
        if (c == '@' && i + 1 < text.size() &&
            detail::is_word_char(static_cast<unsigned char>(text[i + 1]))) {
            ++i; // the '@'
            while (i < text.size() && detail::is_word_char(static_cast<unsigned char>(text[i]))) ++i;
            continue;
        }
        if (c == '#') {
            ++i;
            continue;
        }
        if (c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
            out.push_back(' ');
        } else if (c < 0x20 || c == 0x7f) {
            // other control characters stripped
        } else if (c >= 'A' && c <= 'Z') {
            out.push_back(static_cast<char>(c - 'A' + 'a'));
        } else {
            out.push_back(static_cast<char>(c));
        }
        ++i;
    }
    return out;
}

} // namespace detail

/// Normalize raw tweet text: lowercase ASCII, drop URLs (scheme://...) and
/// @-mentions, keep the word of a #hashtag, map whitespace-class control
/// characters to spaces and strip the rest. Non-ASCII UTF-8 bytes pass
/// through unchanged. Removing one entity can expose another ("@#bob" leaves
/// "@bob"), so the pass runs to a fixpoint; the result is total and
/// idempotent.
inline std::string normalize(std::string_view text) {
    std::string current(text);
    while (true) {
        std::string next = detail::normalize_pass(current);
        if (next == current) return current;
        current = std::move(next);
    }
}

/// Split normalized text on runs of non-alphanumeric characters. Non-ASCII
/// bytes stick to the surrounding token; a token must contain at least one
/// ASCII letter or digit, so pure-punctuation fragments vanish.
inline std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::string current;
    bool has_alnum = false;
    auto flush = [&] {
        if (!current.empty() && has_alnum) tokens.push_back(current);
        current.clear();
        has_alnum = false;
    };
    for (char ch : text) {
        const unsigned char c = static_cast<unsigned char>(ch);
        if (detail::is_ascii_alnum(c)) {
            current.push_back(ch);
            has_alnum = true;
        } else if (c >= 0x80) {
            current.push_back(ch);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

inline TokenizedDocument tokenize_document(const LabeledDocument& doc) {
    return {doc.id, tokenize(normalize(doc.text)), doc.label};
}

inline std::vector<TokenizedDocument> tokenize_corpus(std::span<const LabeledDocument> docs) {
    std::vector<TokenizedDocument> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(tokenize_document(d));
    return out;
}

} // namespace emoforge

#endif // EMOFORGE_TEXTPREP_HPP
