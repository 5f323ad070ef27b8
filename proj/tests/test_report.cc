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

#include <cmath>
#include <sstream>

#include "ambig/error.h"
#include "ambig/report.h"
#include "doctest.h"
#include "helpers.h"

using namespace ambig;

namespace {

ExampleRecord record(std::string condition, std::uint64_t seed, std::string id, std::size_t gold, std::size_t pred,
                     std::vector<std::size_t> demo_labels = {}, std::optional<double> entropy = std::nullopt) {
    ExampleRecord r;
    r.condition = std::move(condition);
    r.seed = seed;
    r.example_id = std::move(id);
    r.gold = label_at(gold);
    r.predicted = label_at(pred);
    for (std::size_t i = 0; i < demo_labels.size(); ++i) {
        r.demo_ids.push_back("d" + std::to_string(i));
        r.demo_labels.push_back(label_at(demo_labels[i]));
    }
    r.retrieved_labels = r.demo_labels;
    r.entropy_bits = entropy;
    return r;
}

}  // namespace

TEST_CASE("condition names") {
    CHECK(Condition{Strategy::kZero, 0}.name() == "zero");
    CHECK(Condition{Strategy::kAmbigGoldMis, 8}.name() == "ambig_gold_mis-8");
}

TEST_CASE("example record round trip") {
    const LabelSpace labels(test_support::label_names(3));
    auto r = record("retr-2", 4, "q7", 1, 2, {1, 0}, 0.75);
    r.scores = std::vector<double>{-3.0, -2.5, -1.0};
    r.prompt_hash = 0xdeadbeefcafef00dULL;
    r.stage = Stage::kGoldMis;
    const auto json = record_to_json(r, labels);
    CHECK(json["gold"] == "L1");
    CHECK(json["prompt_hash"] == "deadbeefcafef00d");
    const auto back = record_from_json(nlohmann::json::parse(json.dump()), labels);
    CHECK(record_to_json(back, labels) == json);
    CHECK(back.prompt_hash == r.prompt_hash);
    CHECK(back.stage == Stage::kGoldMis);

    auto freq = record("freq", 0, "q1", 0, 0);
    const auto fj = record_to_json(freq, labels);
    CHECK(fj["scores"].is_null());
    CHECK(record_from_json(fj, labels).scores == std::nullopt);

    auto inconsistent = json;
    inconsistent["predicted"] = "L0";
    CHECK_THROWS_AS(record_from_json(inconsistent, labels), DataError);
    auto unknown = json;
    unknown["gold"] = "L9";
    CHECK_THROWS_AS(record_from_json(unknown, labels), DataError);
}

TEST_CASE("aggregate report") {
    const LabelSpace labels(test_support::label_names(2));
    const std::vector<Condition> conditions{{Strategy::kFreq, 0}, {Strategy::kRetr, 2}, {Strategy::kZero, 0}};
    std::vector<ExampleRecord> records;
    for (std::uint64_t seed : {0, 1}) {
        records.push_back(record("freq", seed, "a", 0, 0));
        records.push_back(record("freq", seed, "b", 1, 0));
        records.push_back(record("retr-2", seed, "a", 0, 0, {0, 1}, 0.5));
        records.push_back(record("retr-2", seed, "b", 1, seed == 0 ? 1 : 0, {1, 1}, 0.9));
        records.push_back(record("zero", seed, "a", 0, 1, {}, 1.0));
        records.push_back(record("zero", seed, "b", 1, 1, {}, 0.2));
    }
    const auto report = aggregate_report("toy", labels, conditions, {0, 1}, records, std::nullopt);
    REQUIRE(report.conditions.size() == 3);
    const auto& retr = report.conditions[1];
    CHECK(retr.seeds[0].scores.f1_macro == 1.0);
    CHECK(retr.seeds[1].scores.f1_macro == doctest::Approx(1.0 / 3.0));
    CHECK(retr.f1_macro.mean == doctest::Approx(2.0 / 3.0));
    REQUIRE(retr.f1_macro.stddev);
    CHECK(*retr.f1_macro.stddev == doctest::Approx(std::sqrt(2.0) / 3.0));
    CHECK(retr.gold_share->mean == doctest::Approx(0.75));
    CHECK(retr.mean_entropy_bits->mean == doctest::Approx(0.7));
    const auto& freq = report.conditions[0];
    CHECK_FALSE(freq.mean_entropy_bits);
    CHECK_FALSE(freq.gold_share);
    CHECK(report.conditions[2].mean_entropy_bits->mean == doctest::Approx(0.6));
    REQUIRE(report.pearson_f1_entropy);
    CHECK(std::isfinite(*report.pearson_f1_entropy));

    const auto csv = report_to_csv(report);
    std::istringstream lines(csv);
    std::string line;
    std::size_t rows = 0;
    bool saw_aggregate = false;
    while (std::getline(lines, line)) {
        ++rows;
        if (line.rfind("retr-2,retr,2,aggregate,4,", 0) == 0) {
            saw_aggregate = true;
        }
    }
    CHECK(rows == 1 + 3 * 3);
    CHECK(saw_aggregate);

    const auto json = report_to_json(report);
    CHECK(json["conditions"][1]["summary"]["f1_macro"]["mean"].get<double>() == doctest::Approx(2.0 / 3.0));
    CHECK(json["conditions"][0]["summary"]["mean_entropy_bits"].is_null());

    const auto single = aggregate_report("toy", labels, conditions, {0}, records, std::nullopt);
    CHECK_FALSE(single.conditions[1].f1_macro.stddev);
}

TEST_CASE("confusion csv") {
    const LabelSpace labels(std::vector<std::string>{"a,b", "c"});
    ConfusionMatrix m(2);
    m.add(label_at(0), label_at(1));
    CHECK(confusion_to_csv(m, labels) == "gold\\predicted,\"a,b\",c\n\"a,b\",0,1\nc,0,0\n");
}
