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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ambig/corpus.h"
#include "ambig/embedding.h"
#include "ambig/error.h"
#include "ambig/scorer.h"

namespace ambig {

/// The two labels a model is most confused about for one input.
struct AmbiguousLabelSet {
    std::string example_id;
    LabelId first;
    LabelId second;

    bool contains(LabelId label) const { return label == first || label == second; }
};

/// Top-2 labels by score; ties go to the lower id at each position. Throws
/// std::invalid_argument for fewer than two scores.
AmbiguousLabelSet ambiguous_set(std::span<const double> scores, std::string example_id = {});
inline AmbiguousLabelSet ambiguous_set(const LabelScores& scores, std::string example_id = {}) {
    return ambiguous_set(scores.scores, std::move(example_id));
}

struct ZeroShotEntry {
    PredictionRecord record;
    LabelId gold;
    std::optional<AmbiguousLabelSet> ambiguous;
};

/// Zero-shot predictions keyed by example id, in insertion order.
class ZeroShotTable {
public:
    /// Replaces any existing entry for the same id.
    void insert(ZeroShotEntry entry);

    const ZeroShotEntry* find(std::string_view id) const;
    /// Throws DataError when the id is absent.
    const ZeroShotEntry& at(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id) != nullptr; }
    std::size_t size() const { return entries_.size(); }
    const std::vector<ZeroShotEntry>& entries() const { return entries_; }

    /// Fraction of entries predicted correctly; 0 for an empty table.
    double accuracy() const;

    /// One JSON object per line: id, gold, scores, predicted, correct and,
    /// for test examples, the ambiguous pair.
    void save_jsonl(const std::filesystem::path& path, const LabelSpace& labels) const;
    static ZeroShotTable load_jsonl(const std::filesystem::path& path, const LabelSpace& labels);

private:
    std::vector<ZeroShotEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct ExampleFailure {
    std::string example_id;
    std::string message;
    ErrorKind kind;
};

/// Scores the zero-shot prompt of every example. With `failures` null, the
/// first scorer error is rethrown prefixed with the example id; otherwise
/// failed examples are reported there and left out of the table.
ZeroShotTable zero_shot_pass(std::span<const LabeledExample> examples, std::string_view task_definition,
                             const LabelSpace& labels, Scorer& scorer, bool with_ambiguous,
                             std::size_t workers = 1, std::vector<ExampleFailure>* failures = nullptr);

/// Candidates whose zero-shot prediction was wrong, in rank order. Throws
/// DataError if a candidate is missing from the table.
RankedCandidates misclassified_candidates(const RankedCandidates& ranked, const ZeroShotTable& table);

struct GoldInAmbigRate {
    double overall;
    /// Per gold label; nullopt for labels with no test example.
    std::vector<std::optional<double>> per_label;
    std::vector<std::size_t> support;
};

GoldInAmbigRate gold_in_ambig_rate(std::span<const AmbiguousLabelSet> sets, std::span<const LabelId> golds,
                                   std::size_t num_labels);

}  // namespace ambig
