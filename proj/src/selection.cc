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

#include "ambig/selection.h"

#include <stdexcept>
#include <string>

#include "ambig/error.h"

namespace ambig {

namespace {

constexpr Strategy kAllStrategies[] = {Strategy::kFreq,      Strategy::kZero,          Strategy::kStaticN,
                                       Strategy::kRetr,      Strategy::kAmbigGold,     Strategy::kAmbigGoldMis,
                                       Strategy::kAmbigGoldMisPred};

const LabeledExample& train_example(const Dataset& dataset, const std::string& id) {
    if (const auto* example = dataset.find(Split::kTrain, id)) {
        return *example;
    }
    throw DataError("retrieved candidate '" + id + "' is not a training example");
}

struct StageScan {
    std::vector<std::size_t> admitted;  // indices into ranked.items
    std::size_t scanned = 0;            // rank of the last examined candidate
};

StageScan scan_stage(Stage stage, const RankedCandidates& ranked, const AmbiguousLabelSet& ambiguous,
                     const ZeroShotTable& table, const Dataset& dataset, const SelectionConfig& config) {
    StageScan scan;
    const auto& items = ranked.items;
    const std::size_t n = config.n_shots;
    if (stage == Stage::kRetr) {
        for (std::size_t i = 0; i < items.size() && scan.admitted.size() < n; ++i) {
            scan.admitted.push_back(i);
            scan.scanned = items[i].rank;
        }
        return scan;
    }
    if (stage == Stage::kGold) {
        const std::size_t pool = std::min(config.candidate_budget, items.size());
        for (std::size_t i = 0; i < pool && scan.admitted.size() < n; ++i) {
            scan.scanned = items[i].rank;
            if (ambiguous.contains(train_example(dataset, items[i].id).gold)) {
                scan.admitted.push_back(i);
            }
        }
        return scan;
    }
    // gold_mis / gold_mis_pred: the pool is the first `budget` misclassified
    // candidates in rank order.
    std::size_t misclassified_seen = 0;
    for (std::size_t i = 0; i < items.size() && scan.admitted.size() < n; ++i) {
        if (misclassified_seen == config.candidate_budget) {
            break;
        }
        scan.scanned = items[i].rank;
        const auto& prediction = table.at(items[i].id).record;
        if (prediction.correct) {
            continue;
        }
        ++misclassified_seen;
        const LabelId gold = train_example(dataset, items[i].id).gold;
        if (!ambiguous.contains(gold)) {
            continue;
        }
        if (stage == Stage::kGoldMisPred && !ambiguous.contains(prediction.predicted)) {
            continue;
        }
        scan.admitted.push_back(i);
    }
    return scan;
}

SelectionOutcome make_outcome(const StageScan& scan, Stage stage, const RankedCandidates& ranked,
                              const Dataset& dataset, const SelectionConfig& config) {
    SelectionOutcome outcome;
    outcome.demos.test_example_id = ranked.query_id;
    outcome.satisfied_stage = stage;
    outcome.candidates_scanned = scan.scanned;
    outcome.short_fill = scan.admitted.size() < config.n_shots;
    for (auto i : scan.admitted) {
        const auto& candidate = ranked.items[i];
        outcome.demos.demos.push_back({train_example(dataset, candidate.id), stage, candidate.rank});
    }
    return outcome;
}

}  // namespace

std::string_view strategy_name(Strategy strategy) {
    switch (strategy) {
        case Strategy::kFreq:
            return "freq";
        case Strategy::kZero:
            return "zero";
        case Strategy::kStaticN:
            return "static_n";
        case Strategy::kRetr:
            return "retr";
        case Strategy::kAmbigGold:
            return "ambig_gold";
        case Strategy::kAmbigGoldMis:
            return "ambig_gold_mis";
        case Strategy::kAmbigGoldMisPred:
            return "ambig_gold_mis_pred";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
    for (Strategy s : kAllStrategies) {
        if (strategy_name(s) == name) {
            return s;
        }
    }
    return std::nullopt;
}

bool is_ambig(Strategy strategy) {
    return strategy == Strategy::kAmbigGold || strategy == Strategy::kAmbigGoldMis ||
           strategy == Strategy::kAmbigGoldMisPred;
}

bool uses_shot_count(Strategy strategy) { return strategy == Strategy::kRetr || is_ambig(strategy); }

Stage requested_stage(Strategy strategy) {
    switch (strategy) {
        case Strategy::kAmbigGold:
            return Stage::kGold;
        case Strategy::kAmbigGoldMis:
            return Stage::kGoldMis;
        case Strategy::kAmbigGoldMisPred:
            return Stage::kGoldMisPred;
        case Strategy::kStaticN:
            return Stage::kStatic;
        default:
            return Stage::kRetr;
    }
}

void SelectionConfig::validate() const {
    if (n_shots == 0) {
        throw std::invalid_argument("n_shots must be at least 1");
    }
    if (candidate_budget < n_shots) {
        throw std::invalid_argument("candidate budget " + std::to_string(candidate_budget) +
                                    " is smaller than n_shots " + std::to_string(n_shots));
    }
}

DemonstrationSet select_static_n(const Dataset& dataset) {
    const auto& labels = dataset.labels();
    std::vector<const LabeledExample*> first(labels.size(), nullptr);
    for (const auto& example : dataset.train()) {
        auto& slot = first[index_of(example.gold)];
        if (slot == nullptr) {
            slot = &example;
        }
    }
    DemonstrationSet set;
    for (std::size_t l = 0; l < labels.size(); ++l) {
        if (first[l] == nullptr) {
            throw DataError("static_n: label '" + labels.name(label_at(l)) + "' has no training example");
        }
        set.demos.push_back({*first[l], Stage::kStatic, 0});
    }
    return set;
}

DemonstrationSet select_retr(const RankedCandidates& ranked, std::size_t n, const Dataset& dataset) {
    if (ranked.depth() < n) {
        throw DataError("retr: only " + std::to_string(ranked.depth()) + " candidates for " + std::to_string(n) +
                        " shots");
    }
    DemonstrationSet set;
    set.test_example_id = ranked.query_id;
    for (std::size_t i = 0; i < n; ++i) {
        set.demos.push_back({train_example(dataset, ranked.items[i].id), Stage::kRetr, ranked.items[i].rank});
    }
    return set;
}

SelectionOutcome select_ambig(const RankedCandidates& ranked, const AmbiguousLabelSet& ambiguous,
                              const ZeroShotTable& table, const Dataset& dataset, const SelectionConfig& config) {
    config.validate();
    if (!is_ambig(config.strategy)) {
        throw std::invalid_argument("select_ambig: strategy '" + std::string(strategy_name(config.strategy)) +
                                    "' is not an ambig variant");
    }
    if (ranked.depth() < config.n_shots) {
        throw DataError("ambig: only " + std::to_string(ranked.depth()) + " candidates for " +
                        std::to_string(config.n_shots) + " shots");
    }
    const Stage requested = requested_stage(config.strategy);
    const Stage weakest = config.fallback_enabled ? Stage::kRetr : requested;
    for (auto stage = requested;; stage = static_cast<Stage>(static_cast<int>(stage) - 1)) {
        const auto scan = scan_stage(stage, ranked, ambiguous, table, dataset, config);
        if (scan.admitted.size() == config.n_shots || stage == weakest) {
            return make_outcome(scan, stage, ranked, dataset, config);
        }
    }
}

StrategyResult select_for_strategy(const LabeledExample& test_example, const SelectionContext& context,
                                   const SelectionConfig& config) {
    const auto require = [&](bool present, const char* what) {
        if (!present) {
            throw std::invalid_argument(std::string(strategy_name(config.strategy)) + " needs " + what);
        }
    };
    switch (config.strategy) {
        case Strategy::kFreq:
            require(context.majority.has_value(), "the majority label");
            return FreqPrediction{*context.majority};
        case Strategy::kZero:
            return ZeroShotMarker{};
        case Strategy::kStaticN: {
            require(context.static_demos != nullptr, "static demonstrations");
            SelectionOutcome outcome{*context.static_demos, Stage::kStatic, 0, false};
            outcome.demos.test_example_id = test_example.id;
            return outcome;
        }
        case Strategy::kRetr: {
            require(context.ranked != nullptr && context.dataset != nullptr, "ranked candidates and the dataset");
            config.validate();
            SelectionOutcome outcome{select_retr(*context.ranked, config.n_shots, *context.dataset), Stage::kRetr,
                                     0, false};
            outcome.candidates_scanned = outcome.demos.demos.back().rank;
            outcome.demos.test_example_id = test_example.id;
            return outcome;
        }
        case Strategy::kAmbigGold:
        case Strategy::kAmbigGoldMis:
        case Strategy::kAmbigGoldMisPred: {
            require(context.ranked != nullptr && context.dataset != nullptr, "ranked candidates and the dataset");
            require(context.ambiguous != nullptr, "the test example's ambiguous label set");
            require(context.train_predictions != nullptr, "zero-shot predictions for the training pool");
            auto outcome =
                select_ambig(*context.ranked, *context.ambiguous, *context.train_predictions, *context.dataset, config);
            outcome.demos.test_example_id = test_example.id;
            return outcome;
        }
    }
    throw std::invalid_argument("unknown strategy");
}

}  // namespace ambig
