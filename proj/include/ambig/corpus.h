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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ambig {

/// Index of a label within its LabelSpace; ids run 0..N-1.
enum class LabelId : std::uint32_t {};

constexpr std::size_t index_of(LabelId id) { return static_cast<std::size_t>(id); }
constexpr LabelId label_at(std::size_t index) { return static_cast<LabelId>(index); }

struct Label {
    LabelId id;
    std::string name;
};

/// Ordered set of output labels. The order is canonical: it fixes score
/// vector layout, argmax tie-breaks and confusion-matrix axes.
class LabelSpace {
public:
    LabelSpace() = default;
    /// Throws DataError unless there are at least two unique, non-empty names.
    explicit LabelSpace(std::vector<std::string> names);

    std::size_t size() const { return names_.size(); }
    const std::string& name(LabelId id) const { return names_.at(index_of(id)); }
    Label label(LabelId id) const { return {id, name(id)}; }
    std::optional<LabelId> find(std::string_view name) const;
    /// Like find(), but throws DataError for unknown names.
    LabelId at(std::string_view name) const;
    const std::vector<std::string>& names() const { return names_; }

    /// Digest of the ordered names; part of every score cache key.
    std::uint64_t fingerprint() const { return fingerprint_; }

    bool operator==(const LabelSpace& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, LabelId> lookup_;
    std::uint64_t fingerprint_ = 0;
};

struct LabeledExample {
    std::string id;
    std::string text;
    LabelId gold;
};

enum class Split { kTrain, kDev, kTest };

std::string_view split_name(Split split);

class Dataset {
public:
    Dataset(std::string name, LabelSpace labels, std::string task_definition,
            std::vector<LabeledExample> train, std::vector<LabeledExample> dev,
            std::vector<LabeledExample> test);

    const std::string& name() const { return name_; }
    const LabelSpace& labels() const { return labels_; }
    const std::string& task_definition() const { return task_definition_; }
    const std::vector<LabeledExample>& split(Split split) const;
    const std::vector<LabeledExample>& train() const { return train_; }
    const std::vector<LabeledExample>& dev() const { return dev_; }
    const std::vector<LabeledExample>& test() const { return test_; }

    /// Looks an id up in one split; nullptr when absent.
    const LabeledExample* find(Split split, std::string_view id) const;
    /// Looks an id up in any split.
    const LabeledExample* find(std::string_view id) const;

private:
    std::string name_;
    LabelSpace labels_;
    std::string task_definition_;
    std::vector<LabeledExample> train_, dev_, test_;
    std::unordered_map<std::string, std::size_t> train_index_, dev_index_, test_index_;
};

/// Reads `manifest.json` plus one JSONL file per declared split.
///
/// Every record must carry a non-empty `id`, non-empty `text` and a single
/// label name from the manifest's label list. Declared split sizes must match
/// the number of records. Violations throw DataError naming file and line.
Dataset load_dataset(const std::filesystem::path& dir);

/// Writes a dataset in the layout accepted by load_dataset().
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

/// Serializes one record as the single-line JSON object used in split files.
std::string record_to_json(const LabeledExample& example, const LabelSpace& labels);

/// Returns false if `text` is not well-formed UTF-8.
bool is_valid_utf8(std::string_view text);

class LabelCounts {
public:
    explicit LabelCounts(std::vector<std::size_t> counts) : counts_(std::move(counts)) {}

    std::size_t count(LabelId id) const { return counts_.at(index_of(id)); }
    const std::vector<std::size_t>& counts() const { return counts_; }
    std::size_t total() const;
    /// Most frequent label; ties go to the lowest id.
    LabelId majority() const;

private:
    std::vector<std::size_t> counts_;
};

/// Tallies gold labels. Throws std::invalid_argument for an empty split.
LabelCounts label_frequencies(std::span<const LabeledExample> split, const LabelSpace& labels);

}  // namespace ambig
