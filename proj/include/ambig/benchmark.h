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

#include "ambig/corpus.h"
#include "ambig/embedding.h"
#include "ambig/scorer.h"

namespace ambig {

/// Parameters of a generated classification benchmark whose zero-shot
/// behaviour is known in advance. Two labels are made confusable by giving
/// them nearly parallel weight rows.
struct SyntheticBenchmarkParams {
    std::size_t num_labels = 5;
    std::size_t train_size = 1000;
    std::size_t test_size = 500;
    std::uint32_t retrieval_dim = 16;
    double retrieval_noise = 2.5;  // norm of the noise around each label centroid
    double feature_scale = 2.0;
    double train_feature_noise = 1.2;
    double test_feature_noise = 1.2;
    std::size_t confusable_a = 0;
    std::size_t confusable_b = 1;
    double confusable_overlap = 0.9;
    double alpha = 0.4;
    double sigma = 0.05;
    std::uint64_t seed = 7;
};

struct SyntheticBenchmark {
    Dataset dataset;
    EmbeddingStore retrieval;  // train and test, for kNN
    EmbeddingStore features;   // train and test, read by the synthetic scorer
    SyntheticWeights weights;
};

/// Deterministic in `params`. Every test example's gold label lies in its
/// zero-shot ambiguous set under the returned weights.
SyntheticBenchmark make_synthetic_benchmark(const SyntheticBenchmarkParams& params);

/// Writes data/, embeddings.emb, features.emb, weights.json and a ready to
/// run experiment.conf into `dir`.
void write_synthetic_benchmark(const SyntheticBenchmark& bench, const std::filesystem::path& dir);

/// Reads a weights file: either an array of rows or {"rows": [...]}.
std::vector<std::vector<double>> load_weight_rows(const std::filesystem::path& path);

}  // namespace ambig
