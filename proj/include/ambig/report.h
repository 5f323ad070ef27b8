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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ambig/ambiguity.h"
#include "ambig/metrics.h"
#include "ambig/selection.h"
#include "json.hpp"

namespace ambig {

/// One cell of the experiment grid: a strategy at a shot count. freq, zero
/// and static_n ignore the shot count and carry n_shots = 0.
struct Condition {
    Strategy strategy;
    std::size_t n_shots = 0;

    std::string name() const;
    bool operator==(const Condition&) const = default;
};

/// Outcome for one test example under one condition and shuffle seed.
struct ExampleRecord {
    std::string condition;
    std::uint64_t seed = 0;
    std::string example_id;
    LabelId gold;
    LabelId predicted;
    /// Final prompted scores; absent for freq.
    std::optional<std::vector<double>> scores;
    std::optional<double> entropy_bits;
    std::optional<std::uint64_t> prompt_hash;
    /// Demonstrations in prompt order.
    std::vector<std::string> demo_ids;
    std::vector<LabelId> demo_labels;
    /// Gold labels of the top-n retrieved candidates (retr and ambig only).
    std::vector<LabelId> retrieved_labels;
    std::optional<Stage> stage;
};

nlohmann::json record_to_json(const ExampleRecord& record, const LabelSpace& labels);
ExampleRecord record_from_json(const nlohmann::json& json, const LabelSpace& labels);

/// Selection trace for one test example under one condition.
struct SelectionRecord {
    std::string condition;
    std::string example_id;
    SelectionOutcome outcome;
};

nlohmann::json selection_to_json(const SelectionRecord& record, const LabelSpace& labels);

struct SeedMetrics {
    std::uint64_t seed;
    std::size_t evaluated;
    ClassificationScores scores;
    std::optional<double> mean_entropy_bits;
    std::optional<double> gold_share;
    std::optional<double> gold_share_retrieved;
    ConfusionMatrix confusion;
};

struct ConditionReport {
    Condition condition;
    std::vector<SeedMetrics> seeds;
    MeanStd f1_macro, precision_macro, recall_macro, accuracy;
    std::optional<MeanStd> mean_entropy_bits, gold_share, gold_share_retrieved;
};

struct EvaluationReport {
    std::string dataset;
    LabelSpace labels;
    std::vector<ConditionReport> conditions;
    std::optional<GoldInAmbigRate> gold_in_ambig;
    /// Across conditions with an entropy: mean F1 against mean entropy.
    std::optional<double> pearson_f1_entropy;
    std::optional<std::string> pearson_note;
};

/// Recomputes every aggregate from per-example records. Conditions and seeds
/// appear in the given order; a (condition, seed) cell without records is
/// omitted.
EvaluationReport aggregate_report(const std::string& dataset, const LabelSpace& labels,
                                  const std::vector<Condition>& conditions, const std::vector<std::uint64_t>& seeds,
                                  const std::vector<ExampleRecord>& records,
                                  const std::optional<GoldInAmbigRate>& gold_in_ambig);

nlohmann::json report_to_json(const EvaluationReport& report);
/// One row per condition and seed plus one aggregate row per condition.
std::string report_to_csv(const EvaluationReport& report);
/// Square grid with label names on both axes; rows are gold labels.
std::string confusion_to_csv(const ConfusionMatrix& matrix, const LabelSpace& labels);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace ambig
