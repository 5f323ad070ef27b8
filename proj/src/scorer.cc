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

#include "ambig/scorer.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ambig/error.h"
#include "ambig/hash.h"
#include "ambig/http.h"
#include "ambig/prompting.h"
#include "ambig/random.h"
#include "json.hpp"

namespace ambig {

using nlohmann::json;

LabelId predict(std::span<const double> scores) {
    if (scores.empty()) {
        throw std::invalid_argument("predict: empty score vector");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) {
            best = i;
        }
    }
    return label_at(best);
}

LabelDistribution normalize(std::span<const double> scores) {
    LabelDistribution dist;
    if (scores.empty()) {
        return dist;
    }
    const double max = *std::max_element(scores.begin(), scores.end());
    dist.probs.resize(scores.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        dist.probs[i] = std::exp(scores[i] - max);
        sum += dist.probs[i];
    }
    for (auto& p : dist.probs) {
        p /= sum;
    }
    return dist;
}

PredictionRecord make_prediction(std::string example_id, LabelScores scores, LabelId gold) {
    const LabelId predicted = predict(scores);
    return {std::move(example_id), std::move(scores), predicted, predicted == gold};
}

HttpScoringBackend::HttpScoringBackend(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {
    split_url(endpoint_.url);
}

std::string HttpScoringBackend::id() const { return "http:" + endpoint_.url; }

std::vector<double> HttpScoringBackend::score(std::string_view prompt, const LabelSpace& labels) {
    const json body = {{"prompt", std::string(prompt)}, {"labels", labels.names()}};
    const json reply = post_json(endpoint_, body);
    const auto it = reply.find("scores");
    if (!reply.is_object() || it == reply.end() || !it->is_array()) {
        throw BackendError(endpoint_.url + " reply has no 'scores' array", false);
    }
    std::vector<double> scores;
    scores.reserve(it->size());
    for (const auto& value : *it) {
        if (!value.is_number()) {
            throw BackendError(endpoint_.url + " reply has a non-numeric score", false);
        }
        scores.push_back(value.get<double>());
    }
    return scores;
}

LabelScores synthetic_score(std::span<const float> features, std::span<const std::size_t> demo_counts,
                            const SyntheticWeights& weights, std::uint64_t noise_key) {
    if (demo_counts.size() != weights.rows.size()) {
        throw std::invalid_argument("synthetic_score: demo counts do not match the weight rows");
    }
    LabelScores out;
    out.prompt_hash = noise_key;
    out.scores.resize(weights.rows.size());
    for (std::size_t l = 0; l < weights.rows.size(); ++l) {
        const auto& row = weights.rows[l];
        if (row.size() != features.size()) {
            throw std::invalid_argument("synthetic_score: feature dim " + std::to_string(features.size()) +
                                        " != weight dim " + std::to_string(row.size()));
        }
        double dot = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            dot += row[k] * static_cast<double>(features[k]);
        }
        const double bias = weights.alpha * static_cast<double>(demo_counts[l]);
        const double noise = weights.sigma == 0.0 ? 0.0 : weights.sigma * counter_gaussian(weights.seed, noise_key, l);
        out.scores[l] = dot + bias + noise;
    }
    return out;
}

SyntheticBackend::SyntheticBackend(SyntheticWeights weights, FeatureFn features, std::string feature_source_id)
    : weights_(std::move(weights)), features_(std::move(features)) {
    if (weights_.rows.empty()) {
        throw ConfigError("synthetic backend needs at least one weight row");
    }
    if (weights_.alpha < 0.0 || weights_.sigma < 0.0) {
        throw ConfigError("synthetic alpha and sigma must be non-negative");
    }
    std::ostringstream params;
    params.precision(17);
    params << weights_.alpha << '|' << weights_.sigma << '|' << weights_.seed << '|' << feature_source_id;
    std::uint64_t h = fnv1a64(params.str());
    for (const auto& row : weights_.rows) {
        std::ostringstream r;
        r.precision(17);
        for (double v : row) {
            r << v << ',';
        }
        h = fnv1a64(r.str() + ";", h);
    }
    id_ = "synthetic:" + to_hex(h);
}

std::vector<double> SyntheticBackend::score(std::string_view prompt, const LabelSpace& labels) {
    if (labels.size() != weights_.rows.size()) {
        throw ConfigError("synthetic weights have " + std::to_string(weights_.rows.size()) +
                          " rows for a label space of " + std::to_string(labels.size()));
    }
    const auto parsed = parse_prompt(prompt);
    if (!parsed) {
        throw BackendError("synthetic backend cannot parse the prompt scaffold", false);
    }
    std::vector<std::size_t> counts(labels.size(), 0);
    for (const auto& [input, answer] : parsed->demos) {
        const auto id = labels.find(answer);
        if (!id) {
            throw BackendError("synthetic backend: demonstration label '" + answer + "' not in label space", false);
        }
        ++counts[index_of(*id)];
    }
    const auto features = features_(parsed->test_text);
    return synthetic_score(features, counts, weights_, fnv1a64(prompt)).scores;
}

ScoreCache::ScoreCache(const std::filesystem::path& file) {
    std::optional<std::uintmax_t> torn_at;
    if (std::filesystem::exists(file)) {
        std::ifstream in(file, std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::size_t start = 0;
        std::size_t line_no = 0;
        while (start < content.size()) {
            const auto end = content.find('\n', start);
            ++line_no;
            if (end == std::string::npos) {
                // Torn final write from an interrupted run; drop it.
                torn_at = start;
                break;
            }
            const std::string_view line(content.data() + start, end - start);
            start = end + 1;
            try {
                const auto record = json::parse(line);
                const auto prompt_hash = parse_hex(record.at("prompt_hash").get<std::string>());
                const auto labels = parse_hex(record.at("labels").get<std::string>());
                if (!prompt_hash || !labels) {
                    throw DataError("bad digest");
                }
                entries_[{record.at("backend").get<std::string>(), *prompt_hash, *labels}] =
                    record.at("scores").get<std::vector<double>>();
            } catch (const std::exception& e) {
                throw DataError("corrupt score cache " + file.string() + " line " + std::to_string(line_no) +
                                ": " + e.what());
            }
        }
    } else if (file.has_parent_path()) {
        std::filesystem::create_directories(file.parent_path());
    }
    if (torn_at) {
        std::filesystem::resize_file(file, *torn_at);
    }
    file_.open(file, std::ios::binary | std::ios::app);
    if (!file_) {
        throw DataError("cannot open score cache " + file.string());
    }
}

std::optional<std::vector<double>> ScoreCache::get(const CacheKey& key) const {
    std::shared_lock lock(mutex_);
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void ScoreCache::put(const CacheKey& key, const std::vector<double>& scores) {
    std::unique_lock lock(mutex_);
    entries_[key] = scores;
    if (file_.is_open()) {
        json record = {{"backend", key.backend_id},
                       {"prompt_hash", to_hex(key.prompt_hash)},
                       {"labels", to_hex(key.labels_fingerprint)},
                       {"scores", scores}};
        file_ << record.dump() << '\n';
        file_.flush();
    }
}

std::size_t ScoreCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

Scorer::Scorer(ScoringBackend& backend, ScoreCache& cache)
    : backend_(backend), cache_(cache), backend_id_(backend.id()) {}

std::vector<double> Scorer::fetch(std::string_view prompt, const LabelSpace& labels) {
    ++calls_;
    auto scores = backend_.score(prompt, labels);
    if (scores.size() != labels.size()) {
        throw BackendError(backend_id_ + " returned " + std::to_string(scores.size()) + " scores for " +
                               std::to_string(labels.size()) + " labels",
                           false);
    }
    if (!std::all_of(scores.begin(), scores.end(), [](double s) { return std::isfinite(s); })) {
        throw BackendError(backend_id_ + " returned a non-finite score", false);
    }
    return scores;
}

LabelScores Scorer::score_labels(std::string_view prompt, const LabelSpace& labels) {
    if (prompt.empty()) {
        throw std::invalid_argument("score_labels: empty prompt");
    }
    CacheKey key{backend_id_, fnv1a64(prompt), labels.fingerprint()};
    LabelScores out{{}, backend_id_, key.prompt_hash};
    if (auto cached = cache_.get(key)) {
        ++hits_;
        out.scores = std::move(*cached);
        return out;
    }

    std::promise<std::vector<double>> promise;
    std::shared_future<std::vector<double>> pending;
    bool owner = false;
    {
        std::lock_guard lock(inflight_mutex_);
        if (auto cached = cache_.get(key)) {
            ++hits_;
            out.scores = std::move(*cached);
            return out;
        }
        const auto it = inflight_.find(key);
        if (it != inflight_.end()) {
            pending = it->second;
            ++coalesced_;
        } else {
            pending = promise.get_future().share();
            inflight_.emplace(key, pending);
            owner = true;
        }
    }
    if (owner) {
        try {
            auto scores = fetch(prompt, labels);
            cache_.put(key, scores);
            promise.set_value(std::move(scores));
        } catch (...) {
            promise.set_exception(std::current_exception());
        }
        std::lock_guard lock(inflight_mutex_);
        inflight_.erase(key);
    }
    out.scores = pending.get();
    return out;
}

ScorerStats Scorer::stats() const { return {hits_.load(), calls_.load(), coalesced_.load()}; }

}  // namespace ambig
