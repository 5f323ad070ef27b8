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

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "ambig/ambiguity.h"
#include "ambig/corpus.h"
#include "ambig/embedding.h"
#include "ambig/scorer.h"

namespace test_support {

using namespace ambig;

struct Gen {
    std::mt19937_64 engine;
    explicit Gen(std::uint64_t seed) : engine(seed) {}
    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine); }
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
    bool coin(double p = 0.5) { return real(0.0, 1.0) < p; }
};

inline std::vector<std::string> label_names(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back("L" + std::to_string(i));
    }
    return names;
}

inline std::string pool_id(std::size_t i) { return "t" + std::to_string(i); }

/// Train split t0..t{m-1} with the given golds and a single test example.
inline Dataset pool_dataset(const std::vector<std::size_t>& golds, std::size_t num_labels) {
    std::vector<LabeledExample> train;
    for (std::size_t i = 0; i < golds.size(); ++i) {
        train.push_back({pool_id(i), "text " + std::to_string(i), label_at(golds[i])});
    }
    return Dataset("pool", LabelSpace(label_names(num_labels)), "Classify.", std::move(train), {},
                   {{"q", "query", label_at(0)}});
}

/// Candidates in train order with ranks 1..m.
inline RankedCandidates ranked_in_order(std::size_t m) {
    RankedCandidates ranked{"q", {}};
    for (std::size_t i = 0; i < m; ++i) {
        ranked.items.push_back({pool_id(i), static_cast<double>(m - i), i + 1});
    }
    return ranked;
}

inline ZeroShotTable table_for(const Dataset& dataset, const std::vector<std::size_t>& preds) {
    ZeroShotTable table;
    const auto& train = dataset.train();
    for (std::size_t i = 0; i < preds.size(); ++i) {
        std::vector<double> scores(dataset.labels().size(), 0.0);
        scores[preds[i]] = 1.0;
        const auto pred = label_at(preds[i]);
        table.insert({{train[i].id, {scores, "test", 0}, pred, pred == train[i].gold}, train[i].gold, std::nullopt});
    }
    return table;
}

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("ambig_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Scoring backend with a fixed answer per prompt, counting calls.
class CountingBackend : public ScoringBackend {
public:
    explicit CountingBackend(std::vector<double> scores) : scores_(std::move(scores)) {}
    std::string id() const override { return "counting"; }
    std::vector<double> score(std::string_view, const LabelSpace&) override {
        ++calls;
        return scores_;
    }
    std::atomic<int> calls{0};

private:
    std::vector<double> scores_;
};

}  // namespace test_support
