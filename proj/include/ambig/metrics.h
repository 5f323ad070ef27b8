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
#include <optional>
#include <span>
#include <vector>

#include "ambig/corpus.h"
#include "ambig/prompting.h"
#include "ambig/scorer.h"

namespace ambig {

/// Rows are gold labels, columns predictions, both in canonical label order.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t num_labels);

    /// Throws std::out_of_range for a label outside the space.
    void add(LabelId gold, LabelId predicted);

    std::size_t num_labels() const { return n_; }
    std::uint64_t at(LabelId gold, LabelId predicted) const { return counts_[index_of(gold) * n_ + index_of(predicted)]; }
    std::uint64_t total() const { return total_; }
    std::uint64_t row_sum(LabelId gold) const;
    std::uint64_t column_sum(LabelId predicted) const;
    std::uint64_t trace() const;

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::size_t n_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

ConfusionMatrix confusion(std::span<const LabelId> golds, std::span<const LabelId> predicted, std::size_t num_labels);

struct ClassificationScores {
    double precision_macro;
    double recall_macro;
    double f1_macro;
    double accuracy;
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
};

/// Per-class P/R/F1 with 0 for any zero denominator, macro-averaged over all
/// N classes whether or not they occur. Throws std::invalid_argument for an
/// empty matrix.
ClassificationScores classification_scores(const ConfusionMatrix& matrix);
inline double f1_macro(const ConfusionMatrix& matrix) { return classification_scores(matrix).f1_macro; }

/// Shannon entropy in bits, with 0 log 0 = 0.
double entropy_bits(std::span<const double> probs);
inline double entropy_bits(const LabelDistribution& dist) { return entropy_bits(dist.probs); }

/// Fraction of `demo_labels` equal to `gold`; 0 for an empty list.
double gold_share(std::span<const LabelId> demo_labels, LabelId gold);
/// Mean of the per-example shares. Empty demo lists count as 0.
double gold_share(std::span<const std::vector<LabelId>> demo_labels, std::span<const LabelId> golds);
double gold_share(std::span<const DemonstrationSet> demos, std::span<const LabelId> golds);

/// Sample Pearson correlation. Throws std::domain_error when either input has
/// zero variance and std::invalid_argument for fewer than two points.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

struct MeanStd {
    double mean;
    /// Sample standard deviation; absent for a single value.
    std::optional<double> stddev;
};

/// Throws std::invalid_argument for an empty input.
MeanStd mean_stddev(std::span<const double> values);

}  // namespace ambig
