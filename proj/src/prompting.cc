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

#include "ambig/prompting.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "ambig/random.h"

namespace ambig {

std::string_view stage_name(Stage stage) {
    switch (stage) {
        case Stage::kStatic:
            return "static";
        case Stage::kRetr:
            return "retr";
        case Stage::kGold:
            return "gold";
        case Stage::kGoldMis:
            return "gold_mis";
        case Stage::kGoldMisPred:
            return "gold_mis_pred";
    }
    return "unknown";
}

std::optional<Stage> parse_stage(std::string_view name) {
    for (Stage s : {Stage::kStatic, Stage::kRetr, Stage::kGold, Stage::kGoldMis, Stage::kGoldMisPred}) {
        if (stage_name(s) == name) {
            return s;
        }
    }
    return std::nullopt;
}

std::string_view order_policy_name(OrderPolicy policy) {
    switch (policy) {
        case OrderPolicy::kRank:
            return "rank";
        case OrderPolicy::kShuffled:
            return "shuffled";
        case OrderPolicy::kEntropyAscending:
            return "entropy";
    }
    return "unknown";
}

std::optional<OrderPolicy> parse_order_policy(std::string_view name) {
    for (OrderPolicy p : {OrderPolicy::kRank, OrderPolicy::kShuffled, OrderPolicy::kEntropyAscending}) {
        if (order_policy_name(p) == name) {
            return p;
        }
    }
    return std::nullopt;
}

std::string build_zero_shot(std::string_view defn, std::string_view test_text) {
    std::string prompt;
    prompt.reserve(defn.size() + test_text.size() + 2 + kQueryScaffold.size() + kAnswerSuffix.size());
    prompt.append(defn).append("\n\n").append(kQueryScaffold).append(test_text).append(kAnswerSuffix);
    return prompt;
}

std::string build_few_shot(std::string_view defn, std::span<const Demonstration> demos,
                           const LabelSpace& labels, std::string_view test_text) {
    if (demos.empty()) {
        throw std::invalid_argument("build_few_shot: no demonstrations (use build_zero_shot)");
    }
    std::string prompt;
    prompt.append(defn).append("\n\n").append(kExamplesHeader);
    for (const auto& demo : demos) {
        prompt.append("input: ").append(demo.example.text);
        prompt.append("\nanswer: ").append(labels.name(demo.example.gold)).append("\n\n");
    }
    prompt.append(kQueryScaffold).append(test_text).append(kAnswerSuffix);
    return prompt;
}

DemonstrationSet order_demos(DemonstrationSet demos, OrderPolicy policy, std::uint64_t seed,
                             std::optional<std::span<const double>> entropies) {
    auto& items = demos.demos;
    switch (policy) {
        case OrderPolicy::kRank:
            std::stable_sort(items.begin(), items.end(),
                             [](const Demonstration& a, const Demonstration& b) { return a.rank < b.rank; });
            demos.seed.reset();
            break;
        case OrderPolicy::kShuffled: {
            std::mt19937_64 engine(seed);
            for (std::size_t i = items.size(); i > 1; --i) {
                const auto j = static_cast<std::size_t>(uniform_below(engine, i));
                std::swap(items[i - 1], items[j]);
            }
            demos.seed = seed;
            break;
        }
        case OrderPolicy::kEntropyAscending: {
            if (!entropies || entropies->size() != items.size()) {
                throw std::invalid_argument("order_demos: entropy ordering needs one entropy per demo");
            }
            std::vector<std::size_t> order(items.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            const auto& h = *entropies;
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (h[a] != h[b]) {
                    return h[a] < h[b];
                }
                return items[a].rank < items[b].rank;
            });
            std::vector<Demonstration> sorted;
            sorted.reserve(items.size());
            for (auto i : order) {
                sorted.push_back(std::move(items[i]));
            }
            items = std::move(sorted);
            demos.seed.reset();
            break;
        }
    }
    demos.order_policy = policy;
    return demos;
}

std::optional<ParsedPrompt> parse_prompt(std::string_view prompt) {
    if (prompt.size() < kAnswerSuffix.size() ||
        prompt.substr(prompt.size() - kAnswerSuffix.size()) != kAnswerSuffix) {
        return std::nullopt;
    }
    const auto body = prompt.substr(0, prompt.size() - kAnswerSuffix.size());
    const auto query = body.rfind(kQueryScaffold);
    if (query == std::string_view::npos) {
        return std::nullopt;
    }
    ParsedPrompt parsed;
    parsed.test_text = std::string(body.substr(query + kQueryScaffold.size()));

    const auto head = body.substr(0, query);  // "{defn}\n\n" or "{defn}\n\nSome examples are:\n{demos}"
    std::string separator = "\n\n";
    separator.append(kExamplesHeader);
    const auto examples = head.find(separator);
    if (examples == std::string_view::npos) {
        if (head.size() < 2 || head.substr(head.size() - 2) != "\n\n") {
            return std::nullopt;
        }
        parsed.definition = std::string(head.substr(0, head.size() - 2));
        return parsed;
    }
    parsed.definition = std::string(head.substr(0, examples));
    auto rest = head.substr(examples + separator.size());
    constexpr std::string_view kInput = "input: ";
    constexpr std::string_view kAnswer = "\nanswer: ";
    while (!rest.empty()) {
        if (rest.substr(0, kInput.size()) != kInput) {
            return std::nullopt;
        }
        rest.remove_prefix(kInput.size());
        const auto answer = rest.find(kAnswer);
        if (answer == std::string_view::npos) {
            return std::nullopt;
        }
        std::string input(rest.substr(0, answer));
        rest.remove_prefix(answer + kAnswer.size());
        const auto end = rest.find("\n\n");
        if (end == std::string_view::npos) {
            return std::nullopt;
        }
        parsed.demos.emplace_back(std::move(input), std::string(rest.substr(0, end)));
        rest.remove_prefix(end + 2);
    }
    if (parsed.demos.empty()) {
        return std::nullopt;
    }
    return parsed;
}

}  // namespace ambig
