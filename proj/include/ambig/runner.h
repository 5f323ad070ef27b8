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
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ambig/ambiguity.h"
#include "ambig/config.h"
#include "ambig/report.h"
#include "ambig/scorer.h"
#include "json.hpp"

namespace ambig {

struct FileDigest {
    std::string fnv1a64;  // hex
    std::size_t lines = 0;
};

/// Everything needed to audit or re-execute a run. Written last, atomically.
struct RunManifest {
    std::string version;
    std::string config_text;
    std::string dataset;
    std::vector<std::string> labels;
    std::vector<Condition> conditions;
    std::vector<std::uint64_t> seeds;
    std::string backend_id;
    ScorerStats scorer_stats;
    std::size_t cache_entries = 0;
    // condition -> satisfied stage (or "short_fill", "failed") -> count
    std::map<std::string, std::map<std::string, std::size_t>> fallback_histogram;
    std::map<std::string, double> timings_ms;
    std::map<std::string, FileDigest> files;
    std::vector<ExampleFailure> failures;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& json);
};

struct RunResult {
    EvaluationReport report;
    RunManifest manifest;
    /// 0, or the exit code of the first per-example failure.
    int exit_code = 0;
};

/// The condition grid: freq, zero and static_n once each, retr and the
/// ambiguity strategies once per shot count, in configuration order.
std::vector<Condition> expand_conditions(const ExperimentConfig& config);

/// Builds the scoring backend named by the config. `retrieval` is used when
/// the synthetic scorer reads its features from the retrieval store.
std::unique_ptr<ScoringBackend> make_scoring_backend(const ExperimentConfig& config, const Dataset& dataset);

/// Runs the full grid and writes all artifacts under config.out. Per-example
/// failures are recorded and skipped unless config.fail_fast is set.
RunResult run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Verifies the record checksums of a finished run and recomputes its report
/// from records.jsonl. A differing report.json is a DataError; missing
/// aggregate files are regenerated.
EvaluationReport replay_run(const std::filesystem::path& run_dir, std::ostream* log = nullptr);

/// Prints the zero-shot result, selection traces, rebuilt prompts and scores
/// for one test example. Prompt hashes are re-verified.
void inspect_example(const std::filesystem::path& run_dir, std::string_view example_id, std::ostream& out);

int exit_code_for(ErrorKind kind);

}  // namespace ambig
