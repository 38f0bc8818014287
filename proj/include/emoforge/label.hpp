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

#ifndef EMOFORGE_LABEL_HPP
#define EMOFORGE_LABEL_HPP

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "emoforge/errors.hpp"

namespace emoforge {

/// The three emotion classes. Codes are stable across serialization.
enum class Label : int {
    positive = 0,
    negative = 1,
    neutral = 2,
};

inline constexpr int kNumLabels = 3;

inline constexpr std::array<Label, kNumLabels> kAllLabels = {
    Label::positive, Label::negative, Label::neutral};

constexpr int label_code(Label l) { return static_cast<int>(l); }

constexpr Label label_from_code(int code) { return static_cast<Label>(code); }

inline const char* label_name(Label l) {
    switch (l) {
    case Label::positive: return "positive";
    case Label::negative: return "negative";
    case Label::neutral: return "neutral";
    }
    return "?";
}

/// Case-insensitive label lookup; empty optional for anything else.
inline std::optional<Label> try_parse_label(std::string_view s) {
    std::string lower;
    lower.reserve(s.size());
    for (char c : s) {
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (lower == "positive") return Label::positive;
    if (lower == "negative") return Label::negative;
    if (lower == "neutral") return Label::neutral;
    return std::nullopt;
}

inline Label parse_label(std::string_view s) {
    if (auto l = try_parse_label(s)) return *l;
    throw LabelError("unknown label \"" + std::string(s) +
                     "\" (expected positive, negative or neutral)");
}

} // namespace emoforge

#endif // EMOFORGE_LABEL_HPP
