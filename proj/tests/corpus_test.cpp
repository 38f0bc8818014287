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

#include <fstream>
#include <set>

#include "emoforge/corpus.hpp"
#include "support/fixtures.hpp"

using namespace emoforge;
using emoforge::testing::TempDir;
using Catch::Matchers::ContainsSubstring;

namespace {

std::vector<LabeledDocument> table1_corpus() {
    const auto dist = emoforge::testing::reference_distribution();
    std::vector<LabeledDocument> docs;
    docs.reserve(static_cast<std::size_t>(dist.total));
    std::int64_t id = 0;
    for (Label l : kAllLabels) {
        for (std::int64_t i = 0; i < dist.count(l); ++i) docs.push_back({id++, "w", l});
    }
    return docs;
}

} // namespace

TEST_CASE("load_corpus maps rows to documents with sequential ids") {
    TempDir dir("load");
    {
        std::ofstream out(dir.file("data.csv"));
        out << "text,label\nI am happy,positive\nso sad,negative\n";
    }
    const auto docs = load_corpus(dir.file("data.csv"), CorpusFormat::csv);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].id == 0);
    CHECK(docs[0].text == "I am happy");
    CHECK(docs[0].label == Label::positive);
    CHECK(docs[1].id == 1);
    CHECK(docs[1].label == Label::negative);
}

TEST_CASE("load_corpus accepts any column order and extra columns") {
    TempDir dir("cols");
    {
        std::ofstream out(dir.file("data.csv"));
        out << "label,extra,text\npositive,9,hello there\n";
    }
    const auto docs = load_corpus(dir.file("data.csv"), CorpusFormat::csv);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].text == "hello there");
}

TEST_CASE("load_corpus rejects unknown labels, citing the value") {
    TempDir dir("label");
    {
        std::ofstream out(dir.file("data.csv"));
        out << "text,label\nfine,positive\nfurious,angry\n";
    }
    REQUIRE_THROWS_MATCHES(load_corpus(dir.file("data.csv"), CorpusFormat::csv), LabelError,
                           Catch::Matchers::MessageMatches(ContainsSubstring("angry")));
}

TEST_CASE("load_corpus rejects malformed rows, naming the line") {
    TempDir dir("malformed");
    {
        std::ofstream out(dir.file("data.csv"));
        out << "text,label\nok,positive\nonlyonefield\n";
    }
    REQUIRE_THROWS_MATCHES(load_corpus(dir.file("data.csv"), CorpusFormat::csv), ParseError,
                           Catch::Matchers::MessageMatches(ContainsSubstring("line 3")));
}

TEST_CASE("load_corpus rejects empty text rows") {
    TempDir dir("empty");
    {
        std::ofstream out(dir.file("data.csv"));
        out << "text,label\n\"   \",positive\n";
    }
    REQUIRE_THROWS_MATCHES(load_corpus(dir.file("data.csv"), CorpusFormat::csv), ParseError,
                           Catch::Matchers::MessageMatches(ContainsSubstring("row 0")));
}

TEST_CASE("CSV quoting survives commas, quotes and newlines round-trip") {
    TempDir dir("quote");
    std::vector<LabeledDocument> docs = {
        {0, "hello, world", Label::positive},
        {1, "she said \"hi\"", Label::negative},
        {2, "line one\nline two", Label::neutral},
    };
    write_corpus(docs, dir.file("data.csv"));
    const auto loaded = load_corpus(dir.file("data.csv"), CorpusFormat::csv);
    REQUIRE(loaded.size() == docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        CHECK(loaded[i].text == docs[i].text);
        CHECK(loaded[i].label == docs[i].label);
    }
}

TEST_CASE("TSV loads tab-separated rows and refuses embedded tabs on write") {
    TempDir dir("tsv");
    {
        std::ofstream out(dir.file("data.tsv"));
        out << "text\tlabel\ngood stuff\tpositive\n";
    }
    const auto docs = load_corpus(dir.file("data.tsv"), CorpusFormat::tsv);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].text == "good stuff");

    std::vector<LabeledDocument> bad = {{0, "a\tb", Label::positive}};
    REQUIRE_THROWS_AS(write_corpus(bad, dir.file("out.tsv"), CorpusFormat::tsv), ParseError);
}

TEST_CASE("class_distribution counts exactly") {
    CHECK(class_distribution({}).total == 0);

    std::vector<LabeledDocument> three = {
        {0, "a", Label::positive}, {1, "b", Label::negative}, {2, "c", Label::neutral}};
    const auto dist = class_distribution(three);
    for (Label l : kAllLabels) CHECK(dist.count(l) == 1);
    CHECK(dist.total == 3);
}

TEST_CASE("class_distribution reproduces the 131601-document reference mix") {
    const auto docs = table1_corpus();
    const auto dist = class_distribution(docs);
    CHECK(dist.count(Label::positive) == 62629);
    CHECK(dist.count(Label::negative) == 55477);
    CHECK(dist.count(Label::neutral) == 13495);
    CHECK(dist.total == 131601);
}

TEST_CASE("largest-remainder allocation at 0.70 gives the reference split") {
    const std::vector<std::int64_t> counts = {62629, 55477, 13495};
    const auto shares = largest_remainder_allocation(counts, 0.70);
    CHECK(shares[0] == 43840);
    CHECK(shares[1] == 38834); // the one extra goes to the largest remainder
    CHECK(shares[2] == 9446);
    CHECK(shares[0] + shares[1] + shares[2] == 92120);
}

TEST_CASE("stratified_split at 0.70 on the reference corpus yields 92120/39481") {
    const auto docs = table1_corpus();
    const auto split = stratified_split(docs, 0.70, 13);
    CHECK(split.train.size() == 92120);
    CHECK(split.test.size() == 39481);

    const auto train_dist = class_distribution(split.train);
    CHECK(train_dist.count(Label::positive) == 43840);
    CHECK(train_dist.count(Label::negative) == 38834);
    CHECK(train_dist.count(Label::neutral) == 9446);
}

TEST_CASE("stratified_split divides a single class evenly") {
    std::vector<LabeledDocument> docs;
    for (int i = 0; i < 10; ++i) docs.push_back({i, "x", Label::negative});
    const auto split = stratified_split(docs, 0.5, 3);
    CHECK(split.train.size() == 5);
    CHECK(split.test.size() == 5);
}

TEST_CASE("stratified_split is deterministic and partitions by id") {
    SyntheticSpec spec = emoforge::testing::separable_spec({40, 30, 20});
    const auto docs = generate_synthetic_corpus(spec, 5);

    const auto a = stratified_split(docs, 0.7, 99);
    const auto b = stratified_split(docs, 0.7, 99);
    REQUIRE(a.train.size() == b.train.size());
    for (std::size_t i = 0; i < a.train.size(); ++i) CHECK(a.train[i].id == b.train[i].id);

    std::set<std::int64_t> train_ids, test_ids;
    for (const auto& d : a.train) train_ids.insert(d.id);
    for (const auto& d : a.test) test_ids.insert(d.id);
    CHECK(train_ids.size() + test_ids.size() == docs.size());
    for (auto id : train_ids) CHECK_FALSE(test_ids.contains(id));

    // Distribution additivity and the per-class error bound.
    const auto all = class_distribution(docs);
    const auto train_dist = class_distribution(a.train);
    const auto test_dist = class_distribution(a.test);
    for (Label l : kAllLabels) {
        CHECK(train_dist.count(l) + test_dist.count(l) == all.count(l));
        const double exact = 0.7 * static_cast<double>(all.count(l));
        CHECK(std::abs(static_cast<double>(train_dist.count(l)) - exact) < 1.0);
    }
}

TEST_CASE("stratified_split membership does not depend on input order") {
    SyntheticSpec spec = emoforge::testing::separable_spec({25, 25, 10});
    auto docs = generate_synthetic_corpus(spec, 11);
    const auto before = stratified_split(docs, 0.6, 4);

    Rng rng(77);
    rng.shuffle(docs);
    const auto after = stratified_split(docs, 0.6, 4);

    std::set<std::int64_t> a, b;
    for (const auto& d : before.train) a.insert(d.id);
    for (const auto& d : after.train) b.insert(d.id);
    CHECK(a == b);
}

TEST_CASE("stratified_split rejects a class with fewer than 2 members") {
    std::vector<LabeledDocument> docs = {
        {0, "a", Label::positive}, {1, "b", Label::positive}, {2, "c", Label::neutral}};
    REQUIRE_THROWS_MATCHES(stratified_split(docs, 0.5, 1), SplitError,
                           Catch::Matchers::MessageMatches(ContainsSubstring("neutral")));
}

TEST_CASE("generate_synthetic_corpus with zero overlap keeps class vocabularies disjoint") {
    SyntheticSpec spec = emoforge::testing::separable_spec({10, 10, 10});
    const auto docs = generate_synthetic_corpus(spec, 1);
    REQUIRE(docs.size() == 30);

    std::array<std::set<std::string>, 3> vocab;
    for (const auto& d : docs) {
        for (const auto& tok : tokenize(normalize(d.text))) {
            vocab[static_cast<std::size_t>(label_code(d.label))].insert(tok);
        }
    }
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            for (const auto& w : vocab[static_cast<std::size_t>(a)]) {
                CHECK_FALSE(vocab[static_cast<std::size_t>(b)].contains(w));
            }
        }
    }
}

TEST_CASE("generate_synthetic_corpus repeats exactly under a fixed seed") {
    SyntheticSpec spec = emoforge::testing::separable_spec({7, 5, 3});
    spec.shared_bank = {"the", "and"};
    spec.overlap = 0.3;
    const auto a = generate_synthetic_corpus(spec, 42);
    const auto b = generate_synthetic_corpus(spec, 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].text == b[i].text);
        CHECK(a[i].label == b[i].label);
    }
}

TEST_CASE("generate_synthetic_corpus rejects an empty bank with nonzero count") {
    SyntheticSpec spec;
    spec.counts = {1, 0, 0};
    REQUIRE_THROWS_AS(generate_synthetic_corpus(spec, 0), ConfigError);
}

TEST_CASE("scale_distribution keeps the reference proportions at N=10000") {
    const auto scaled = scale_distribution(emoforge::testing::reference_distribution(), 10000);
    CHECK(scaled[0] == 4759);
    CHECK(scaled[1] == 4216);
    CHECK(scaled[2] == 1025);
    CHECK(scaled[0] + scaled[1] + scaled[2] == 10000);
}

TEST_CASE("corpus summary serializes to the documented JSON shape") {
    std::vector<LabeledDocument> docs = {{0, "a", Label::positive}, {1, "b", Label::positive}};
    const auto j = distribution_json(class_distribution(docs));
    CHECK(j.at("total") == 2);
    CHECK(j.at("counts").at("positive") == 2);
    CHECK(j.at("counts").at("negative") == 0);
}
