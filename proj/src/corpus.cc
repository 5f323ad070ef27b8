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

#include "ambig/corpus.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "ambig/error.h"
#include "ambig/hash.h"
#include "json.hpp"

namespace ambig {

namespace {

using nlohmann::json;

constexpr Split kAllSplits[] = {Split::kTrain, Split::kDev, Split::kTest};

std::string file_name(Split split) { return std::string(split_name(split)) + ".jsonl"; }

std::unordered_map<std::string, std::size_t> index_ids(const std::vector<LabeledExample>& examples,
                                                       Split split) {
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (!index.emplace(examples[i].id, i).second) {
            throw DataError("duplicate example id '" + examples[i].id + "' in " + file_name(split));
        }
    }
    return index;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<LabeledExample> read_split(const std::filesystem::path& path, const LabelSpace& labels) {
    if (!std::filesystem::exists(path)) {
        throw DataError("missing split file " + path.string());
    }
    const std::string content = read_file(path);
    std::vector<LabeledExample> examples;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string::npos) {
            end = content.size();
        }
        const std::string_view line(content.data() + start, end - start);
        start = end + 1;
        ++line_no;
        const std::string where = path.filename().string() + ":" + std::to_string(line_no);
        if (line.empty()) {
            throw DataError(where + ": empty line");
        }
        if (line.back() == '\r') {
            throw DataError(where + ": CRLF line ending");
        }
        if (!is_valid_utf8(line)) {
            throw DataError(where + ": invalid UTF-8");
        }
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(where + ": " + e.what());
        }
        if (!record.is_object()) {
            throw DataError(where + ": record is not an object");
        }
        const auto id = record.find("id");
        const auto text = record.find("text");
        const auto label = record.find("label");
        if (id == record.end() || !id->is_string() || id->get_ref<const std::string&>().empty()) {
            throw DataError(where + ": missing or empty id");
        }
        if (text == record.end() || !text->is_string() || text->get_ref<const std::string&>().empty()) {
            throw DataError(where + ": empty text");
        }
        if (label == record.end()) {
            throw DataError(where + ": missing label");
        }
        if (label->is_array()) {
            throw DataError(where + ": multi-label records are not supported");
        }
        if (!label->is_string()) {
            throw DataError(where + ": label must be a string");
        }
        const auto& label_name = label->get_ref<const std::string&>();
        const auto gold = labels.find(label_name);
        if (!gold) {
            throw DataError(where + ": unknown label '" + label_name + "'");
        }
        std::string id_text = id->get<std::string>();
        if (!seen.insert(id_text).second) {
            throw DataError(where + ": duplicate example id '" + id_text + "'");
        }
        examples.push_back({std::move(id_text), text->get<std::string>(), *gold});
    }
    return examples;
}

}  // namespace

LabelSpace::LabelSpace(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() < 2) {
        throw DataError("label space needs at least two labels");
    }
    std::uint64_t h = fnv1a64("labels");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty()) {
            throw DataError("empty label name at position " + std::to_string(i));
        }
        if (!lookup_.emplace(names_[i], label_at(i)).second) {
            throw DataError("duplicate label name '" + names_[i] + "'");
        }
        // Length-prefix each name so ["ab","c"] and ["a","bc"] differ.
        h = fnv1a64(std::to_string(names_[i].size()) + ":", h);
        h = fnv1a64(names_[i], h);
    }
    fingerprint_ = h;
}

std::optional<LabelId> LabelSpace::find(std::string_view name) const {
    const auto it = lookup_.find(std::string(name));
    if (it == lookup_.end()) {
        return std::nullopt;
    }
    return it->second;
}

LabelId LabelSpace::at(std::string_view name) const {
    if (auto id = find(name)) {
        return *id;
    }
    throw DataError("unknown label '" + std::string(name) + "'");
}

std::string_view split_name(Split split) {
    switch (split) {
        case Split::kTrain:
            return "train";
        case Split::kDev:
            return "dev";
        case Split::kTest:
            return "test";
    }
    return "unknown";
}

Dataset::Dataset(std::string name, LabelSpace labels, std::string task_definition,
                 std::vector<LabeledExample> train, std::vector<LabeledExample> dev,
                 std::vector<LabeledExample> test)
    : name_(std::move(name)),
      labels_(std::move(labels)),
      task_definition_(std::move(task_definition)),
      train_(std::move(train)),
      dev_(std::move(dev)),
      test_(std::move(test)) {
    for (Split split : kAllSplits) {
        for (const auto& example : this->split(split)) {
            if (index_of(example.gold) >= labels_.size()) {
                throw DataError("example '" + example.id + "' has a gold label outside the label space");
            }
        }
    }
    train_index_ = index_ids(train_, Split::kTrain);
    dev_index_ = index_ids(dev_, Split::kDev);
    test_index_ = index_ids(test_, Split::kTest);
}

const std::vector<LabeledExample>& Dataset::split(Split split) const {
    switch (split) {
        case Split::kTrain:
            return train_;
        case Split::kDev:
            return dev_;
        case Split::kTest:
            break;
    }
    return test_;
}

const LabeledExample* Dataset::find(Split split, std::string_view id) const {
    const auto& index = split == Split::kTrain ? train_index_ : split == Split::kDev ? dev_index_ : test_index_;
    const auto it = index.find(std::string(id));
    return it == index.end() ? nullptr : &this->split(split)[it->second];
}

const LabeledExample* Dataset::find(std::string_view id) const {
    for (Split split : kAllSplits) {
        if (const auto* example = find(split, id)) {
            return example;
        }
    }
    return nullptr;
}

Dataset load_dataset(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    if (!std::filesystem::exists(manifest_path)) {
        throw DataError("missing manifest " + manifest_path.string());
    }
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
        const auto name = manifest.at("name").get<std::string>();
        LabelSpace labels(manifest.at("labels").get<std::vector<std::string>>());
        auto definition = manifest.at("task_definition").get<std::string>();
        if (definition.empty()) {
            throw DataError("manifest task_definition is empty");
        }
        const auto& sizes = manifest.at("splits");
        std::vector<LabeledExample> loaded[3];
        for (Split split : kAllSplits) {
            const std::string key(split_name(split));
            if (!sizes.contains(key)) {
                if (split == Split::kDev) {
                    continue;
                }
                throw DataError("manifest does not declare the " + key + " split");
            }
            const auto declared = sizes.at(key).get<std::size_t>();
            auto examples = read_split(dir / file_name(split), labels);
            if (examples.size() != declared) {
                throw DataError(file_name(split) + " has " + std::to_string(examples.size()) +
                                " records but the manifest declares " + std::to_string(declared));
            }
            loaded[static_cast<int>(split)] = std::move(examples);
        }
        return Dataset(name, std::move(labels), std::move(definition), std::move(loaded[0]),
                       std::move(loaded[1]), std::move(loaded[2]));
    } catch (const json::exception& e) {
        throw DataError("malformed manifest " + manifest_path.string() + ": " + e.what());
    }
}

std::string record_to_json(const LabeledExample& example, const LabelSpace& labels) {
    json record = json::object();
    record["id"] = example.id;
    record["text"] = example.text;
    record["label"] = labels.name(example.gold);
    return record.dump();
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json manifest = json::object();
    manifest["name"] = dataset.name();
    manifest["labels"] = dataset.labels().names();
    manifest["task_definition"] = dataset.task_definition();
    json sizes = json::object();
    for (Split split : kAllSplits) {
        const auto& examples = dataset.split(split);
        sizes[std::string(split_name(split))] = examples.size();
        std::ofstream out(dir / file_name(split), std::ios::binary | std::ios::trunc);
        for (const auto& example : examples) {
            out << record_to_json(example, dataset.labels()) << '\n';
        }
        if (!out) {
            throw DataError("failed writing " + (dir / file_name(split)).string());
        }
    }
    manifest["splits"] = sizes;
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    out << manifest.dump(2) << '\n';
}

bool is_valid_utf8(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        std::size_t extra;
        std::uint32_t code;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xe0) == 0xc0) {
            extra = 1;
            code = c & 0x1f;
        } else if ((c & 0xf0) == 0xe0) {
            extra = 2;
            code = c & 0x0f;
        } else if ((c & 0xf8) == 0xf0) {
            extra = 3;
            code = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= text.size()) {
            return false;
        }
        for (std::size_t k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(text[i + k]);
            if ((cc & 0xc0) != 0x80) {
                return false;
            }
            code = (code << 6) | (cc & 0x3f);
        }
        // Overlong forms, surrogates and out-of-range code points.
        if ((extra == 1 && code < 0x80) || (extra == 2 && code < 0x800) || (extra == 3 && code < 0x10000) ||
            (code >= 0xd800 && code <= 0xdfff) || code > 0x10ffff) {
            return false;
        }
        i += extra + 1;
    }
    return true;
}

std::size_t LabelCounts::total() const {
    std::size_t sum = 0;
    for (auto c : counts_) {
        sum += c;
    }
    return sum;
}

LabelId LabelCounts::majority() const {
    // max_element returns the first maximum, i.e. the lowest id on ties.
    const auto it = std::max_element(counts_.begin(), counts_.end());
    return label_at(static_cast<std::size_t>(it - counts_.begin()));
}

LabelCounts label_frequencies(std::span<const LabeledExample> split, const LabelSpace& labels) {
    if (split.empty()) {
        throw std::invalid_argument("label_frequencies: empty split");
    }
    std::vector<std::size_t> counts(labels.size(), 0);
    for (const auto& example : split) {
        ++counts.at(index_of(example.gold));
    }
    return LabelCounts(std::move(counts));
}

}  // namespace ambig
