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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "ambig/corpus.h"
#include "ambig/embedding.h"

namespace ambig {

/// One raw log-likelihood per label, in canonical label order.
struct LabelScores {
    std::vector<double> scores;
    std::string backend_id;
    std::uint64_t prompt_hash = 0;
};

struct LabelDistribution {
    std::vector<double> probs;
};

struct PredictionRecord {
    std::string example_id;
    LabelScores scores;
    LabelId predicted;
    bool correct;
};

/// Argmax; ties go to the lowest label id. Throws std::invalid_argument on
/// an empty vector.
LabelId predict(std::span<const double> scores);
inline LabelId predict(const LabelScores& scores) { return predict(scores.scores); }

/// Max-shifted softmax.
LabelDistribution normalize(std::span<const double> scores);
inline LabelDistribution normalize(const LabelScores& scores) { return normalize(scores.scores); }

PredictionRecord make_prediction(std::string example_id, LabelScores scores, LabelId gold);

/// A model that assigns a log-likelihood to every label given a prompt.
class ScoringBackend {
public:
    virtual ~ScoringBackend() = default;
    /// Stable identifier; distinct configurations must have distinct ids.
    virtual std::string id() const = 0;
    virtual std::vector<double> score(std::string_view prompt, const LabelSpace& labels) = 0;
};

/// Wire backend: POST {"prompt": ..., "labels": [...]} -> {"scores": [...]}.
class HttpScoringBackend : public ScoringBackend {
public:
    explicit HttpScoringBackend(HttpEndpoint endpoint);

    std::string id() const override;
    std::vector<double> score(std::string_view prompt, const LabelSpace& labels) override;

private:
    HttpEndpoint endpoint_;
};

struct SyntheticWeights {
    /// One row per label; each row has the feature dimension.
    std::vector<std::vector<double>> rows;
    /// Copying bias added per demonstration carrying the label.
    double alpha = 0.0;
    double sigma = 0.05;
    std::uint64_t seed = 0;
};

/// score_l = <rows[l], features> + alpha * demo_counts[l] + sigma * z_l, where
/// z_l is a counter-based normal draw keyed on (seed, noise_key, l).
LabelScores synthetic_score(std::span<const float> features, std::span<const std::size_t> demo_counts,
                            const SyntheticWeights& weights, std::uint64_t noise_key);

/// Maps the test input text of a prompt to its feature vector.
using FeatureFn = std::function<std::vector<float>(std::string_view text)>;

/// Deterministic stand-in for a language model. Parses the prompt back into
/// its test text and demonstration labels, then applies synthetic_score()
/// with the prompt digest as the noise key.
class SyntheticBackend : public ScoringBackend {
public:
    SyntheticBackend(SyntheticWeights weights, FeatureFn features, std::string feature_source_id);

    std::string id() const override { return id_; }
    std::vector<double> score(std::string_view prompt, const LabelSpace& labels) override;

    const SyntheticWeights& weights() const { return weights_; }

private:
    SyntheticWeights weights_;
    FeatureFn features_;
    std::string id_;
};

struct CacheKey {
    std::string backend_id;
    std::uint64_t prompt_hash;
    std::uint64_t labels_fingerprint;

    auto operator<=>(const CacheKey&) const = default;
};

/// Score cache, optionally backed by an append-only JSONL file. Concurrent
/// readers, serialized writers.
class ScoreCache {
public:
    ScoreCache() = default;
    /// Loads existing records (later records win) and appends new ones.
    explicit ScoreCache(const std::filesystem::path& file);

    std::optional<std::vector<double>> get(const CacheKey& key) const;
    void put(const CacheKey& key, const std::vector<double>& scores);
    std::size_t size() const;

private:
    mutable std::shared_mutex mutex_;
    std::map<CacheKey, std::vector<double>> entries_;
    std::ofstream file_;
};

struct ScorerStats {
    std::uint64_t cache_hits = 0;
    std::uint64_t backend_calls = 0;
    std::uint64_t coalesced = 0;
};

/// Cached, coalescing front end to a backend. Safe for concurrent callers:
/// identical in-flight requests share one backend call.
class Scorer {
public:
    Scorer(ScoringBackend& backend, ScoreCache& cache);

    /// Throws std::invalid_argument for an empty prompt and BackendError when
    /// the backend fails or replies with the wrong number of scores.
    LabelScores score_labels(std::string_view prompt, const LabelSpace& labels);

    ScorerStats stats() const;
    const std::string& backend_id() const { return backend_id_; }

private:
    std::vector<double> fetch(std::string_view prompt, const LabelSpace& labels);

    ScoringBackend& backend_;
    ScoreCache& cache_;
    std::string backend_id_;
    std::mutex inflight_mutex_;
    std::map<CacheKey, std::shared_future<std::vector<double>>> inflight_;
    std::atomic<std::uint64_t> hits_{0}, calls_{0}, coalesced_{0};
};

}  // namespace ambig
