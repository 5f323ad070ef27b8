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

#include <algorithm>
#include <set>

#include "ambig/corpus.h"
#include "ambig/prompting.h"
#include "doctest.h"
#include "helpers.h"

using namespace ambig;

namespace {

const std::filesystem::path kFixtures(AMBIG_FIXTURE_DIR);

std::vector<Demonstration> demos_of(const std::vector<LabeledExample>& examples) {
    std::vector<Demonstration> out;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        out.push_back({examples[i], Stage::kRetr, i + 1});
    }
    return out;
}

std::size_t count(std::string_view haystack, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("golden zero-shot and 4-shot prompts") {
    const auto d = load_dataset(kFixtures / "reviews");
    const auto& test = *d.find(Split::kTest, "te1");
    CHECK(build_zero_shot(d.task_definition(), test.text) ==
          test_support::read_text(kFixtures / "golden" / "zero_shot_te1.txt"));
    const std::vector<LabeledExample> first_four(d.train().begin(), d.train().begin() + 4);
    CHECK(build_few_shot(d.task_definition(), demos_of(first_four), d.labels(), test.text) ==
          test_support::read_text(kFixtures / "golden" / "four_shot_te1.txt"));
}

TEST_CASE("template layout") {
    CHECK(build_zero_shot("D", "t") == "D\n\nThus given the following input:\ninput: t\nanswer:");
    const LabelSpace labels({"Pos", "Neg"});
    const auto one = demos_of({{"a", "a", label_at(0)}});
    CHECK(build_few_shot("D", one, labels, "t") ==
          "D\n\nSome examples are:\ninput: a\nanswer: Pos\n\nThus given the following input:\ninput: t\nanswer:");
    const std::string defn = "A definition.", text = "some input";
    const auto overhead = build_zero_shot("", "").size();
    CHECK(build_zero_shot(defn, text).size() == defn.size() + text.size() + overhead);
    CHECK(build_zero_shot(defn, text) == build_zero_shot(defn, text));

    const auto four = demos_of({{"1", "w", label_at(0)}, {"2", "x", label_at(1)}, {"3", "y", label_at(0)},
                                {"4", "z", label_at(1)}});
    const auto prompt = build_few_shot("D", four, labels, "t");
    CHECK(count(prompt, "answer:") == 5);
    CHECK(count(prompt, "answer: ") == 4);
    CHECK_THROWS_AS(build_few_shot("D", std::vector<Demonstration>{}, labels, "t"), std::invalid_argument);
}

TEST_CASE("reordering demos only permutes the demo block") {
    const LabelSpace labels({"Pos", "Neg"});
    auto demos = demos_of({{"1", "alpha", label_at(0)}, {"2", "beta", label_at(1)}, {"3", "gamma", label_at(0)},
                           {"4", "delta", label_at(1)}});
    const std::string head = "Def\n\nSome examples are:\n";
    const std::string tail = "Thus given the following input:\ninput: q\nanswer:";
    std::vector<std::size_t> perm{0, 1, 2, 3};
    std::set<std::string> prompts;
    do {
        std::vector<Demonstration> ordered;
        std::string block;
        for (auto i : perm) {
            ordered.push_back(demos[i]);
            block += "input: " + demos[i].example.text + "\nanswer: " + labels.name(demos[i].example.gold) + "\n\n";
        }
        const auto prompt = build_few_shot("Def", ordered, labels, "q");
        CHECK(prompt == head + block + tail);
        prompts.insert(prompt);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(prompts.size() == 24);
}

TEST_CASE("few-shot and zero-shot differ only by the demo section") {
    const LabelSpace labels({"Pos", "Neg"});
    const auto zero = build_zero_shot("D", "t");
    const auto few = build_few_shot("D", demos_of({{"1", "x", label_at(1)}}), labels, "t");
    const std::string section = "Some examples are:\ninput: x\nanswer: Neg\n\n";
    CHECK(few == zero.substr(0, 3) + section + zero.substr(3));
}

TEST_CASE("parse_prompt inverts the builders") {
    const LabelSpace labels({"Pos", "Neg"});
    const auto demos = demos_of({{"1", "first line", label_at(0)}, {"2", "second", label_at(1)}});
    const auto parsed = parse_prompt(build_few_shot("Defn.\nTwo lines.", demos, labels, "query text"));
    REQUIRE(parsed);
    CHECK(parsed->definition == "Defn.\nTwo lines.");
    REQUIRE(parsed->demos.size() == 2);
    CHECK(parsed->demos[1] == std::pair<std::string, std::string>{"second", "Neg"});
    CHECK(parsed->test_text == "query text");
    const auto zero = parse_prompt(build_zero_shot("D", "t"));
    REQUIRE(zero);
    CHECK(zero->demos.empty());
    CHECK(zero->test_text == "t");
    CHECK_FALSE(parse_prompt("garbage"));
}

TEST_CASE("order_demos") {
    DemonstrationSet set;
    for (std::size_t i = 0; i < 4; ++i) {
        set.demos.push_back({{"d" + std::to_string(i), "x", label_at(0)}, Stage::kRetr, i + 1});
    }
    const auto ids = [](const DemonstrationSet& s) {
        std::vector<std::string> out;
        for (const auto& d : s.demos) {
            out.push_back(d.example.id);
        }
        return out;
    };

    SUBCASE("shuffle is deterministic per seed") {
        const auto a = order_demos(set, OrderPolicy::kShuffled, 7);
        CHECK(ids(a) == ids(order_demos(set, OrderPolicy::kShuffled, 7)));
        CHECK(a.seed == 7u);
        CHECK(a.order_policy == OrderPolicy::kShuffled);
    }
    SUBCASE("entropy ascending, ties by rank") {
        DemonstrationSet three;
        three.demos.assign(set.demos.begin(), set.demos.begin() + 3);
        const std::vector<double> h{1.3, 0.2, 0.9};
        CHECK(ids(order_demos(three, OrderPolicy::kEntropyAscending, 0, std::span<const double>(h))) ==
              std::vector<std::string>{"d1", "d2", "d0"});
        std::swap(three.demos[0], three.demos[2]);  // ranks now 3,2,1
        const std::vector<double> tied{0.5, 0.5, 0.5};
        CHECK(ids(order_demos(three, OrderPolicy::kEntropyAscending, 0, std::span<const double>(tied))) ==
              std::vector<std::string>{"d0", "d1", "d2"});
        CHECK_THROWS_AS(order_demos(three, OrderPolicy::kEntropyAscending, 0), std::invalid_argument);
        const std::vector<double> short_list{0.1};
        CHECK_THROWS_AS(order_demos(three, OrderPolicy::kEntropyAscending, 0, std::span<const double>(short_list)),
                        std::invalid_argument);
    }
    SUBCASE("every permutation of 4 appears over 10k seeds, nothing dropped") {
        std::set<std::vector<std::string>> seen;
        for (std::uint64_t seed = 0; seed < 10000; ++seed) {
            auto order = ids(order_demos(set, OrderPolicy::kShuffled, seed));
            auto sorted = order;
            std::sort(sorted.begin(), sorted.end());
            REQUIRE(sorted == ids(set));
            seen.insert(std::move(order));
        }
        CHECK(seen.size() == 24);
    }
    SUBCASE("rank order restores retrieval order") {
        const auto shuffled = order_demos(set, OrderPolicy::kShuffled, 3);
        CHECK(ids(order_demos(shuffled, OrderPolicy::kRank, 0)) == ids(set));
    }
}

TEST_CASE("policy and stage names round trip") {
    for (auto p : {OrderPolicy::kRank, OrderPolicy::kShuffled, OrderPolicy::kEntropyAscending}) {
        CHECK(parse_order_policy(order_policy_name(p)) == p);
    }
    for (auto s : {Stage::kStatic, Stage::kRetr, Stage::kGold, Stage::kGoldMis, Stage::kGoldMisPred}) {
        CHECK(parse_stage(stage_name(s)) == s);
    }
    CHECK_FALSE(parse_stage("nope"));
}
