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

#include "ambig/ambiguity.h"

#include <fstream>
#include <mutex>
#include <stdexcept>

#include "ambig/hash.h"
#include "ambig/parallel.h"
#include "ambig/prompting.h"
#include "json.hpp"

namespace ambig {

using nlohmann::json;

AmbiguousLabelSet ambiguous_set(std::span<const double> scores, std::string example_id) {
    if (scores.size() < 2) {
        throw std::invalid_argument("ambiguous_set: need at least two labels");
    }
    std::size_t first = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[first]) {
            first = i;
        }
    }
    std::size_t second = first == 0 ? 1 : 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (i != first && scores[i] > scores[second]) {
            second = i;
        }
    }
    return {std::move(example_id), label_at(first), label_at(second)};
}

void ZeroShotTable::insert(ZeroShotEntry entry) {
    const auto it = index_.find(entry.record.example_id);
    if (it != index_.end()) {
        entries_[it->second] = std::move(entry);
        return;
    }
    index_.emplace(entry.record.example_id, entries_.size());
    entries_.push_back(std::move(entry));
}

const ZeroShotEntry* ZeroShotTable::find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &entries_[it->second];
}

const ZeroShotEntry& ZeroShotTable::at(std::string_view id) const {
    if (const auto* entry = find(id)) {
        return *entry;
    }
    throw DataError("no zero-shot prediction for example '" + std::string(id) + "'");
}

double ZeroShotTable::accuracy() const {
    if (entries_.empty()) {
        return 0.0;
    }
    std::size_t correct = 0;
    for (const auto& entry : entries_) {
        correct += entry.record.correct ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(entries_.size());
}

void ZeroShotTable::save_jsonl(const std::filesystem::path& path, const LabelSpace& labels) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    for (const auto& entry : entries_) {
        json record = {{"id", entry.record.example_id},
                       {"gold", labels.name(entry.gold)},
                       {"scores", entry.record.scores.scores},
                       {"backend", entry.record.scores.backend_id},
                       {"prompt_hash", to_hex(entry.record.scores.prompt_hash)},
                       {"predicted", labels.name(entry.record.predicted)},
                       {"correct", entry.record.correct}};
        if (entry.ambiguous) {
            record["ambiguous"] = {labels.name(entry.ambiguous->first), labels.name(entry.ambiguous->second)};
        }
        out << record.dump() << '\n';
    }
}

ZeroShotTable ZeroShotTable::load_jsonl(const std::filesystem::path& path, const LabelSpace& labels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    ZeroShotTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        try {
            const auto record = json::parse(line);
            ZeroShotEntry entry;
            entry.record.example_id = record.at("id").get<std::string>();
            entry.record.scores.scores = record.at("scores").get<std::vector<double>>();
            entry.record.scores.backend_id = record.at("backend").get<std::string>();
            const auto hash = parse_hex(record.at("prompt_hash").get<std::string>());
            if (!hash) {
                throw DataError("bad prompt_hash");
            }
            entry.record.scores.prompt_hash = *hash;
            entry.record.predicted = labels.at(record.at("predicted").get<std::string>());
            entry.record.correct = record.at("correct").get<bool>();
            entry.gold = labels.at(record.at("gold").get<std::string>());
            if (entry.record.scores.scores.size() != labels.size() ||
                predict(entry.record.scores) != entry.record.predicted ||
                entry.record.correct != (entry.record.predicted == entry.gold)) {
                throw DataError("record is inconsistent with its scores");
            }
            if (const auto it = record.find("ambiguous"); it != record.end()) {
                const auto pair = it->get<std::vector<std::string>>();
                if (pair.size() != 2) {
                    throw DataError("ambiguous set must have two labels");
                }
                entry.ambiguous = AmbiguousLabelSet{entry.record.example_id, labels.at(pair[0]), labels.at(pair[1])};
            }
            table.insert(std::move(entry));
        } catch (const std::exception& e) {
            throw DataError(path.filename().string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return table;
}

ZeroShotTable zero_shot_pass(std::span<const LabeledExample> examples, std::string_view task_definition,
                             const LabelSpace& labels, Scorer& scorer, bool with_ambiguous, std::size_t workers,
                             std::vector<ExampleFailure>* failures) {
    std::vector<std::optional<ZeroShotEntry>> results(examples.size());
    std::vector<std::optional<ExampleFailure>> errors(examples.size());
    std::vector<char> retryable(examples.size(), 0);  // not vector<bool>: written concurrently
    parallel_for(examples.size(), workers, [&](std::size_t i) {
        const auto& example = examples[i];
        try {
            auto scores = scorer.score_labels(build_zero_shot(task_definition, example.text), labels);
            ZeroShotEntry entry{make_prediction(example.id, std::move(scores), example.gold), example.gold, {}};
            if (with_ambiguous) {
                entry.ambiguous = ambiguous_set(entry.record.scores, example.id);
            }
            results[i] = std::move(entry);
        } catch (const std::exception& e) {
            errors[i] = ExampleFailure{example.id, "example '" + example.id + "': " + e.what(), error_kind(e)};
            retryable[i] = is_retryable(e);
        }
    });
    ZeroShotTable table;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (errors[i]) {
            if (failures == nullptr) {
                throw_error(errors[i]->kind, errors[i]->message, retryable[i] != 0);
            }
            failures->push_back(std::move(*errors[i]));
            continue;
        }
        table.insert(std::move(*results[i]));
    }
    return table;
}

RankedCandidates misclassified_candidates(const RankedCandidates& ranked, const ZeroShotTable& table) {
    RankedCandidates out{ranked.query_id, {}};
    for (const auto& candidate : ranked.items) {
        if (!table.at(candidate.id).record.correct) {
            out.items.push_back(candidate);
        }
    }
    return out;
}

GoldInAmbigRate gold_in_ambig_rate(std::span<const AmbiguousLabelSet> sets, std::span<const LabelId> golds,
                                   std::size_t num_labels) {
    if (sets.size() != golds.size()) {
        throw std::invalid_argument("gold_in_ambig_rate: " + std::to_string(sets.size()) + " sets for " +
                                    std::to_string(golds.size()) + " golds");
    }
    if (sets.empty()) {
        throw std::invalid_argument("gold_in_ambig_rate: no examples");
    }
    std::vector<std::size_t> hits(num_labels, 0);
    GoldInAmbigRate rate{0.0, std::vector<std::optional<double>>(num_labels), std::vector<std::size_t>(num_labels, 0)};
    std::size_t total_hits = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const auto g = index_of(golds[i]);
        if (g >= num_labels) {
            throw std::invalid_argument("gold_in_ambig_rate: gold label outside the label space");
        }
        ++rate.support[g];
        if (sets[i].contains(golds[i])) {
            ++hits[g];
            ++total_hits;
        }
    }
    rate.overall = static_cast<double>(total_hits) / static_cast<double>(sets.size());
    for (std::size_t l = 0; l < num_labels; ++l) {
        if (rate.support[l] > 0) {
            rate.per_label[l] = static_cast<double>(hits[l]) / static_cast<double>(rate.support[l]);
        }
    }
    return rate;
}

}  // namespace ambig
