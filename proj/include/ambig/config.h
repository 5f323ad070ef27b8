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
#include <string>
#include <string_view>
#include <vector>

#include "ambig/embedding.h"
#include "ambig/prompting.h"
#include "ambig/selection.h"

namespace ambig {

inline constexpr std::string_view kVersion = "0.1.0";

struct SyntheticScorerConfig {
    /// "centroid" (per-label mean of training features) or a JSON file
    /// holding an array of weight rows.
    std::string weights = "centroid";
    /// "embeddings" (the retrieval store), "hash", or an EMB1 file keyed by
    /// example id.
    std::string features = "embeddings";
    std::uint32_t hash_dim = 64;
    double alpha = 0.0;
    double sigma = 0.05;
    std::uint64_t seed = 0;
};

/// Experiment grid and environment. Parsed from a flat `key = value` file;
/// see README for the key list.
struct ExperimentConfig {
    std::filesystem::path dataset;
    std::filesystem::path embeddings;
    std::string scorer = "synthetic";  // synthetic | http
    HttpEndpoint endpoint;
    SyntheticScorerConfig synthetic;
    std::vector<Strategy> strategies;
    std::vector<std::size_t> shots = {4, 8};
    std::vector<std::uint64_t> seeds = {0, 1, 2};
    std::size_t candidate_budget = 250;
    std::size_t retrieval_depth = 250;
    bool fallback_enabled = true;
    OrderPolicy order = OrderPolicy::kShuffled;
    std::filesystem::path out = "run";
    std::optional<std::filesystem::path> cache;
    std::size_t workers = 4;
    bool fail_fast = false;

    /// Sets one key. Relative paths resolve against `base_dir`. Throws
    /// ConfigError for unknown keys or unparsable values.
    void set(std::string_view key, std::string_view value, const std::filesystem::path& base_dir);

    /// Throws ConfigError if the grid is empty or a path does not resolve.
    void validate() const;

    /// Canonical `key = value` text with absolute paths; parse_config() of
    /// this text yields an equivalent config.
    std::string to_text() const;

    std::filesystem::path cache_path() const { return cache ? *cache : out / "score_cache.jsonl"; }
};

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& file);

/// Applies AMBIG_SCORER_URL when set.
void apply_environment(ExperimentConfig& config);

}  // namespace ambig
