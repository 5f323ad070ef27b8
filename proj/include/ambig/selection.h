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
#include <optional>
#include <string_view>
#include <variant>

#include "ambig/ambiguity.h"
#include "ambig/corpus.h"
#include "ambig/embedding.h"
#include "ambig/prompting.h"

namespace ambig {

enum class Strategy {
    kFreq,
    kZero,
    kStaticN,
    kRetr,
    kAmbigGold,
    kAmbigGoldMis,
    kAmbigGoldMisPred,
};

std::string_view strategy_name(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view name);

/// True for the three ambiguity-aware variants.
bool is_ambig(Strategy strategy);
/// True when the strategy's demo count comes from n_shots (retr and ambig_*).
bool uses_shot_count(Strategy strategy);
/// Constraint stage an ambig strategy asks for.
Stage requested_stage(Strategy strategy);

struct SelectionConfig {
    Strategy strategy = Strategy::kRetr;
    std::size_t n_shots = 4;
    /// Scan limit for the ambig stages: top-k retrieved for gold, top-k
    /// misclassified retrieved for gold_mis and gold_mis_pred.
    std::size_t candidate_budget = 250;
    bool fallback_enabled = true;

    /// Throws std::invalid_argument on n_shots == 0 or budget < n_shots.
    void validate() const;
};

struct SelectionOutcome {
    DemonstrationSet demos;
    Stage satisfied_stage;
    /// Retrieval rank of the last candidate the satisfied stage examined.
    std::size_t candidates_scanned = 0;
    /// Set when even the weakest permitted stage could not fill n_shots.
    bool short_fill = false;
};

/// First training example of each label (split order), ordered by label id.
/// Throws DataError if some label has no training example.
DemonstrationSet select_static_n(const Dataset& dataset);

/// Top-n retrieved training examples. Throws DataError if fewer than n.
DemonstrationSet select_retr(const RankedCandidates& ranked, std::size_t n, const Dataset& dataset);

/// Ambiguity-aware selection over a ranked training pool.
///
/// Candidates are scanned in rank order and admitted when
///   gold:          y in L_ambig                    (scan top-budget retrieved)
///   gold_mis:      y in L_ambig and y_hat != y     (scan top-budget misclassified)
///   gold_mis_pred: additionally y_hat in L_ambig   (same scan pool)
/// until n_shots are admitted. A stage that cannot fill n_shots falls back to
/// the next weaker one (gold_mis_pred -> gold_mis -> gold -> retr). With
/// fallback disabled, a short requested stage yields a flagged partial set.
///
/// Gold labels come from `dataset`'s training split, predictions from `table`.
/// Throws DataError if `ranked` holds fewer than n_shots candidates.
SelectionOutcome select_ambig(const RankedCandidates& ranked, const AmbiguousLabelSet& ambiguous,
                              const ZeroShotTable& table, const Dataset& dataset, const SelectionConfig& config);

/// Inputs a strategy may need; unused members may stay null.
struct SelectionContext {
    const Dataset* dataset = nullptr;
    const RankedCandidates* ranked = nullptr;
    const AmbiguousLabelSet* ambiguous = nullptr;
    const ZeroShotTable* train_predictions = nullptr;
    std::optional<LabelId> majority;
    const DemonstrationSet* static_demos = nullptr;
};

/// freq emits the majority label directly.
struct FreqPrediction {
    LabelId label;
};

/// zero uses the zero-shot prompt with no demonstrations.
struct ZeroShotMarker {};

using StrategyResult = std::variant<FreqPrediction, ZeroShotMarker, SelectionOutcome>;

/// Dispatches to the selection rule for config.strategy. Throws
/// std::invalid_argument when the context lacks what the strategy needs.
StrategyResult select_for_strategy(const LabeledExample& test_example, const SelectionContext& context,
                                   const SelectionConfig& config);

}  // namespace ambig
