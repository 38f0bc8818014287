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

#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "emoforge/tagcloud.hpp"
#include "support/fixtures.hpp"

using namespace emoforge;
using emoforge::testing::tok_doc;

namespace {

std::vector<TokenizedDocument> docs_with_counts() {
    // good x5, bad x2, ok x1
    return {
        tok_doc(0, {"good", "good", "bad"}),
        tok_doc(1, {"good", "good", "good", "bad", "ok"}),
    };
}

} // namespace

TEST_CASE("build_cloud counts, filters by min_freq and caps by max_words") {
    CloudParams params;
    params.min_freq = 2;
    params.max_words = 10;
    const auto entries = build_cloud(docs_with_counts(), params);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].word == "good");
    CHECK(entries[0].frequency == 5);
    CHECK(entries[1].word == "bad");
    CHECK(entries[1].frequency == 2);

    params.max_words = 1;
    const auto top = build_cloud(docs_with_counts(), params);
    REQUIRE(top.size() == 1);
    CHECK(top[0].word == "good");
}

TEST_CASE("build_cloud applies the exclusion list") {
    CloudParams params;
    params.min_freq = 1;
    params.exclude = {"good"};
    const auto entries = build_cloud(docs_with_counts(), params);
    for (const auto& e : entries) CHECK(e.word != "good");
}

TEST_CASE("build_cloud rejects empty input") {
    REQUIRE_THROWS_AS(build_cloud({}, CloudParams{}), CloudError);
}

TEST_CASE("group_similar merges run and running under the shortest surface") {
    CloudParams params;
    params.min_freq = 1;
    params.group_similar = true;
    const std::vector<TokenizedDocument> docs = {
        tok_doc(0, {"run", "running", "running"}),
        tok_doc(1, {"run", "running"}),
    };
    const auto entries = build_cloud(docs, params);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].word == "run");
    CHECK(entries[0].frequency == 5);
}

TEST_CASE("stem_word strips one suffix and reduces doubled consonants") {
    CHECK(stem_word("running") == "run");
    CHECK(stem_word("walked") == "walk");
    CHECK(stem_word("cats") == "cat");
    CHECK(stem_word("sing") == "sing");   // remainder would be too short
    CHECK(stem_word("as") == "as");
    CHECK(stem_word("seeing") == "see");  // vowel pair is not reduced... "seeing" -> "see"
    CHECK(stem_word("added") == "add");   // never reduced below 3 characters
}

TEST_CASE("buckets span the quintiles") {
    CloudParams params;
    params.min_freq = 1;
    std::vector<TokenizedDocument> docs;
    // Five words with five distinct frequencies 1..5.
    std::vector<Token> tokens;
    const char* words[] = {"alpha", "bravo", "carol", "delta", "echo"};
    for (int w = 0; w < 5; ++w) {
        for (int k = 0; k <= w; ++k) tokens.push_back(words[w]);
    }
    docs.push_back(tok_doc(0, tokens));
    const auto entries = build_cloud(docs, params);
    REQUIRE(entries.size() == 5);
    std::set<int> buckets;
    for (const auto& e : entries) {
        CHECK(e.size_bucket >= 1);
        CHECK(e.size_bucket <= 5);
        buckets.insert(e.size_bucket);
    }
    CHECK(buckets.size() == 5);
}

TEST_CASE("render_cloud text lists entries alphabetically") {
    const std::vector<CloudEntry> entries = {{"good", 5, 5}, {"bad", 2, 1}};
    CHECK(render_cloud(entries, CloudFormat::text) == "bad (2)\ngood (5)");
}

TEST_CASE("render_cloud html is a single well-formed page") {
    CloudParams params;
    params.min_freq = 1;
    const auto entries = build_cloud(docs_with_counts(), params);
    const auto html = render_cloud(entries, CloudFormat::html);

    auto count = [&](const std::string& needle) {
        std::size_t n = 0, at = 0;
        while ((at = html.find(needle, at)) != std::string::npos) {
            ++n;
            at += needle.size();
        }
        return n;
    };
    CHECK(count("<html>") == 1);
    CHECK(count("</html>") == 1);
    CHECK(count("<span") == entries.size());
    CHECK(count("</span>") == entries.size());
    CHECK(html.find("good") != std::string::npos);
}

TEST_CASE("doubling the corpus doubles frequencies and keeps the ranking") {
    CloudParams params;
    params.min_freq = 1;
    auto docs = docs_with_counts();
    const auto before = build_cloud(docs, params);
    auto doubled = docs;
    for (const auto& d : docs) doubled.push_back(d);
    const auto after = build_cloud(doubled, params);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(after[i].word == before[i].word);
        CHECK(after[i].frequency == 2 * before[i].frequency);
    }
}

TEST_CASE("every entry respects min_freq and the output is deterministic") {
    CloudParams params;
    params.min_freq = 2;
    const auto a = build_cloud(docs_with_counts(), params);
    const auto b = build_cloud(docs_with_counts(), params);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].frequency >= params.min_freq);
        CHECK(a[i].word == b[i].word);
        CHECK(a[i].size_bucket == b[i].size_bucket);
    }
}
