// Copyright 2026 The Ambig-ICL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <map>

#include "ambig/ambiguity.h"
#include "ambig/hash.h"
#include "ambig/error.h"
#include "ambig/prompting.h"
#include "doctest.h"
#include "helpers.h"
#include "oracles.h"

using namespace ambig;
using test_support::Gen;

namespace {

std::vector<double> random_scores(Gen& gen, std::size_t n) {
    std::vector<double> s(n);
    for (auto& x : s) {
        x = gen.coin(0.4) ? static_cast<double>(gen.below(3)) : gen.real(-5, 2);
    }
    return s;
}

// Scores each zero-shot prompt by looking up one-hot features for its text.
std::unique_ptr<SyntheticBackend> feature_backend(const Dataset& d, std::vector<std::size_t> feature_label,
                                                  double sigma) {
    const std::size_t n = d.labels().size();
    SyntheticWeights w;
    w.rows.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        w.rows[i][i] = 1.0;
    }
    w.sigma = sigma;
    std::map<std::string, std::size_t> by_text;
    for (std::size_t i = 0; i < d.train().size(); ++i) {
        by_text[d.train()[i].text] = feature_label[i];
    }
    return std::make_unique<SyntheticBackend>(
        w,
        [by_text, n](std::string_view text) {
            std::vector<float> f(n, 0.0f);
            f[by_text.at(std::string(text))] = 1.0f;
            return f;
        },
        "onehot");
}

}  // namespace

TEST_CASE("ambiguous_set examples") {
    const auto s = ambiguous_set(std::vector<double>{-0.1, -2.0, -0.5}, "x");
    CHECK(s.first == label_at(0));
    CHECK(s.second == label_at(2));
    CHECK(s.example_id == "x");
    const auto tie = ambiguous_set(std::vector<double>{-1.0, -1.0, -2.0});
    CHECK(tie.first == label_at(0));
    CHECK(tie.second == label_at(1));
    const auto tail_tie = ambiguous_set(std::vector<double>{-3.0, 0.0, -1.0, -1.0});
    CHECK(tail_tie.first == label_at(1));
    CHECK(tail_tie.second == label_at(2));
    CHECK_THROWS_AS(ambiguous_set(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("ambiguous_set matches sort-then-take-2 and top-1 consistency") {
    Gen gen(21);
    for (int i = 0; i < 10000; ++i) {
        const auto s = random_scores(gen, gen.between(2, 12));
        const auto set = ambiguous_set(s);
        const auto [a, b] = oracle::top2(s);
        REQUIRE(index_of(set.first) == a);
        REQUIRE(index_of(set.second) == b);
        REQUIRE(set.first == predict(s));
        REQUIRE(set.first != set.second);
    }
}

TEST_CASE("two labels: the ambiguous set is the whole space") {
    Gen gen(22);
    std::vector<AmbiguousLabelSet> sets;
    std::vector<LabelId> golds;
    for (int i = 0; i < 100; ++i) {
        sets.push_back(ambiguous_set(random_scores(gen, 2)));
        golds.push_back(label_at(gen.below(2)));
    }
    CHECK(gold_in_ambig_rate(sets, golds, 2).overall == 1.0);
}

TEST_CASE("zero_shot_pass") {
    const auto d = test_support::pool_dataset({0, 1, 2, 1, 0, 2}, 3);
    std::vector<std::size_t> golds;
    for (const auto& e : d.train()) {
        golds.push_back(index_of(e.gold));
    }
    SUBCASE("perfect features give an all-correct table") {
        auto backend = feature_backend(d, golds, 0.0);
        ScoreCache cache;
        Scorer scorer(*backend, cache);
        const auto table = zero_shot_pass(d.train(), d.task_definition(), d.labels(), scorer, true, 3);
        CHECK(table.size() == 6);
        CHECK(table.accuracy() == 1.0);
        for (const auto& e : d.train()) {
            const auto& entry = table.at(e.id);
            CHECK(entry.record.correct);
            CHECK(entry.record.scores.prompt_hash == fnv1a64(build_zero_shot(d.task_definition(), e.text)));
            REQUIRE(entry.ambiguous);
            CHECK(entry.ambiguous->first == e.gold);
        }
        const auto again = zero_shot_pass(d.train(), d.task_definition(), d.labels(), scorer, true, 2);
        for (const auto& e : d.train()) {
            CHECK(again.at(e.id).record.scores.scores == table.at(e.id).record.scores.scores);
        }
        CHECK(scorer.stats().backend_calls == 6);
    }
    SUBCASE("accuracy equals an independent recount") {
        auto features = golds;
        features[1] = 0;
        features[4] = 2;
        auto backend = feature_backend(d, features, 0.01);
        ScoreCache cache;
        Scorer scorer(*backend, cache);
        const auto table = zero_shot_pass(d.train(), d.task_definition(), d.labels(), scorer, false, 1);
        std::size_t correct = 0;
        for (const auto& e : d.train()) {
            correct += index_of(table.at(e.id).record.predicted) == index_of(e.gold) ? 1 : 0;
            CHECK_FALSE(table.at(e.id).ambiguous);
        }
        CHECK(correct == 4);
        CHECK(table.accuracy() == doctest::Approx(4.0 / 6.0));
    }
    SUBCASE("errors carry the example id") {
        test_support::CountingBackend wrong({1.0, 2.0});
        ScoreCache cache;
        Scorer scorer(wrong, cache);
        try {
            zero_shot_pass(d.train(), d.task_definition(), d.labels(), scorer, false, 1);
            FAIL("expected a failure");
        } catch (const BackendError& e) {
            CHECK(std::string(e.what()).find("t0") != std::string::npos);
        }
        std::vector<ExampleFailure> failures;
        const auto table = zero_shot_pass(d.train(), d.task_definition(), d.labels(), scorer, false, 4, &failures);
        CHECK(table.size() == 0);
        REQUIRE(failures.size() == 6);
        CHECK(failures[0].example_id == "t0");
        CHECK(failures[0].kind == ErrorKind::kBackend);
    }
}

TEST_CASE("zero-shot table persistence") {
    test_support::TempDir tmp;
    const auto d = test_support::pool_dataset({0, 1, 1}, 2);
    const auto table = test_support::table_for(d, {0, 0, 1});
    table.save_jsonl(tmp.path() / "z.jsonl", d.labels());
    const auto back = ZeroShotTable::load_jsonl(tmp.path() / "z.jsonl", d.labels());
    REQUIRE(back.size() == 3);
    CHECK_FALSE(back.at("t1").record.correct);
    CHECK(back.at("t1").record.scores.scores == table.at("t1").record.scores.scores);
    CHECK_THROWS_AS(back.at("zz"), DataError);
}

TEST_CASE("misclassified_candidates") {
    const auto d = test_support::pool_dataset({0, 0, 0, 0, 0, 0}, 2);
    const auto ranked = test_support::ranked_in_order(6);
    CHECK(misclassified_candidates(ranked, test_support::table_for(d, {0, 0, 0, 0, 0, 0})).items.empty());
    const auto alternating = test_support::table_for(d, {0, 1, 0, 1, 0, 1});
    const auto mis = misclassified_candidates(ranked, alternating);
    REQUIRE(mis.items.size() == 3);
    CHECK(mis.items[0].id == "t1");
    CHECK(mis.items[1].id == "t3");
    CHECK(mis.items[2].id == "t5");
    CHECK(mis.items[2].rank == 6);
    CHECK(misclassified_candidates(mis, alternating).items.size() == 3);

    auto missing = ranked;
    missing.items.push_back({"ghost", 0.0, 7});
    CHECK_THROWS_AS(misclassified_candidates(missing, alternating), DataError);

    Gen gen(23);
    std::vector<std::size_t> golds(500), preds(500);
    for (std::size_t i = 0; i < 500; ++i) {
        golds[i] = gen.below(4);
        preds[i] = gen.coin(0.3) ? gen.below(4) : golds[i];
    }
    const auto big = test_support::pool_dataset(golds, 4);
    const auto table = test_support::table_for(big, preds);
    const auto all = test_support::ranked_in_order(500);
    const auto filtered = misclassified_candidates(all, table);
    std::vector<std::string> expected;
    for (std::size_t i = 0; i < 500; ++i) {
        if (golds[i] != preds[i]) {
            expected.push_back(test_support::pool_id(i));
        }
    }
    REQUIRE(filtered.items.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(filtered.items[i].id == expected[i]);
    }
}

TEST_CASE("gold_in_ambig_rate") {
    const std::vector<AmbiguousLabelSet> sets{{"a", label_at(0), label_at(1)}, {"b", label_at(2), label_at(0)}};
    CHECK(gold_in_ambig_rate(sets, std::vector<LabelId>{label_at(0), label_at(2)}, 3).overall == 1.0);
    const auto never = gold_in_ambig_rate(sets, std::vector<LabelId>{label_at(2), label_at(1)}, 3);
    CHECK(never.overall == 0.0);
    CHECK(never.per_label[2] == 0.0);
    CHECK_FALSE(never.per_label[0].has_value());
    CHECK_THROWS_AS(gold_in_ambig_rate(sets, std::vector<LabelId>{label_at(0)}, 3), std::invalid_argument);

    Gen gen(24);
    std::vector<AmbiguousLabelSet> many;
    std::vector<LabelId> golds;
    std::vector<std::size_t> hits(5, 0), support(5, 0);
    std::size_t total_hits = 0;
    for (int i = 0; i < 200; ++i) {
        const auto a = gen.below(5);
        const auto b = (a + 1 + gen.below(4)) % 5;
        const auto g = gen.below(5);
        many.push_back({"", label_at(a), label_at(b)});
        golds.push_back(label_at(g));
        ++support[g];
        if (g == a || g == b) {
            ++hits[g];
            ++total_hits;
        }
    }
    const auto rate = gold_in_ambig_rate(many, golds, 5);
    CHECK(rate.overall == doctest::Approx(total_hits / 200.0));
    for (std::size_t l = 0; l < 5; ++l) {
        CHECK(rate.support[l] == support[l]);
        if (support[l] > 0) {
            CHECK(*rate.per_label[l] == doctest::Approx(static_cast<double>(hits[l]) / support[l]));
        }
    }
}
