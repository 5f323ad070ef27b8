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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ambig/corpus.h"

namespace ambig {

// Fixed scaffold strings. Prompt bytes feed the score cache key, so these
// must never change.
inline constexpr std::string_view kExamplesHeader = "Some examples are:\n";
inline constexpr std::string_view kQueryScaffold = "Thus given the following input:\ninput: ";
inline constexpr std::string_view kAnswerSuffix = "\nanswer:";

/// Which selection rule admitted a demonstration (or produced an outcome).
/// The ambiguity-aware stages are ordered from weakest to strictest.
enum class Stage {
    kStatic,
    kRetr,
    kGold,
    kGoldMis,
    kGoldMisPred,
};

std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

struct Demonstration {
    LabeledExample example;
    Stage provenance;
    /// 1-based retrieval rank; 0 when the demo was not retrieved.
    std::size_t rank;
};

enum class OrderPolicy {
    kRank,
    kShuffled,
    kEntropyAscending,
};

std::string_view order_policy_name(OrderPolicy policy);
std::optional<OrderPolicy> parse_order_policy(std::string_view name);

struct DemonstrationSet {
    std::string test_example_id;
    std::vector<Demonstration> demos;
    OrderPolicy order_policy = OrderPolicy::kRank;
    std::optional<std::uint64_t> seed;
};

/// {defn}\n\nThus given the following input:\ninput: {test}\nanswer:
std::string build_zero_shot(std::string_view defn, std::string_view test_text);

/// {defn}\n\nSome examples are:\n, then input: {x}\nanswer: {y}\n\n per demo,
/// then the zero-shot scaffold. Throws std::invalid_argument for no demos.
std::string build_few_shot(std::string_view defn, std::span<const Demonstration> demos,
                           const LabelSpace& labels, std::string_view test_text);
inline std::string build_few_shot(std::string_view defn, const DemonstrationSet& demos,
                                  const LabelSpace& labels, std::string_view test_text) {
    return build_few_shot(defn, demos.demos, labels, test_text);
}

/// Reorders demos. kShuffled runs a Fisher-Yates pass driven by a seeded
/// mt19937_64; kEntropyAscending sorts by `entropies` (aligned with the
/// current demo order), breaking ties by retrieval rank. Never adds or drops
/// a demo.
DemonstrationSet order_demos(DemonstrationSet demos, OrderPolicy policy, std::uint64_t seed,
                             std::optional<std::span<const double>> entropies = std::nullopt);

struct ParsedPrompt {
    std::string definition;
    std::vector<std::pair<std::string, std::string>> demos;  // (input, answer)
    std::string test_text;
};

/// Inverse of build_zero_shot()/build_few_shot(). Returns nullopt when the
/// bytes do not follow the scaffold.
std::optional<ParsedPrompt> parse_prompt(std::string_view prompt);

}  // namespace ambig
