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

#include "ambig/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ambig {

ConfusionMatrix::ConfusionMatrix(std::size_t num_labels) : n_(num_labels), counts_(num_labels * num_labels, 0) {}

void ConfusionMatrix::add(LabelId gold, LabelId predicted) {
    const auto g = index_of(gold);
    const auto p = index_of(predicted);
    if (g >= n_ || p >= n_) {
        throw std::out_of_range("confusion: label outside the label space");
    }
    ++counts_[g * n_ + p];
    ++total_;
}

std::uint64_t ConfusionMatrix::row_sum(LabelId gold) const {
    std::uint64_t sum = 0;
    for (std::size_t p = 0; p < n_; ++p) {
        sum += counts_[index_of(gold) * n_ + p];
    }
    return sum;
}

std::uint64_t ConfusionMatrix::column_sum(LabelId predicted) const {
    std::uint64_t sum = 0;
    for (std::size_t g = 0; g < n_; ++g) {
        sum += counts_[g * n_ + index_of(predicted)];
    }
    return sum;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        sum += counts_[i * n_ + i];
    }
    return sum;
}

ConfusionMatrix confusion(std::span<const LabelId> golds, std::span<const LabelId> predicted,
                          std::size_t num_labels) {
    if (golds.size() != predicted.size()) {
        throw std::invalid_argument("confusion: " + std::to_string(golds.size()) + " golds vs " +
                                    std::to_string(predicted.size()) + " predictions");
    }
    ConfusionMatrix matrix(num_labels);
    for (std::size_t i = 0; i < golds.size(); ++i) {
        matrix.add(golds[i], predicted[i]);
    }
    return matrix;
}

ClassificationScores classification_scores(const ConfusionMatrix& matrix) {
    if (matrix.total() == 0) {
        throw std::invalid_argument("classification_scores: empty confusion matrix");
    }
    const std::size_t n = matrix.num_labels();
    ClassificationScores out{0.0, 0.0, 0.0, 0.0, std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t c = 0; c < n; ++c) {
        const LabelId label = label_at(c);
        const auto tp = static_cast<double>(matrix.at(label, label));
        const auto predicted = static_cast<double>(matrix.column_sum(label));  // TP + FP
        const auto actual = static_cast<double>(matrix.row_sum(label));        // TP + FN
        const double p = predicted > 0 ? tp / predicted : 0.0;
        const double r = actual > 0 ? tp / actual : 0.0;
        out.precision[c] = p;
        out.recall[c] = r;
        out.f1[c] = p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
        out.precision_macro += p;
        out.recall_macro += r;
        out.f1_macro += out.f1[c];
    }
    out.precision_macro /= static_cast<double>(n);
    out.recall_macro /= static_cast<double>(n);
    out.f1_macro /= static_cast<double>(n);
    out.accuracy = static_cast<double>(matrix.trace()) / static_cast<double>(matrix.total());
    return out;
}

double entropy_bits(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) {
            h -= p * std::log2(p);
        }
    }
    // -p log p sums can round to a tiny negative for one-hot inputs.
    return h < 0.0 ? 0.0 : h;
}

double gold_share(std::span<const LabelId> demo_labels, LabelId gold) {
    if (demo_labels.empty()) {
        return 0.0;
    }
    std::size_t same = 0;
    for (auto label : demo_labels) {
        same += label == gold ? 1 : 0;
    }
    return static_cast<double>(same) / static_cast<double>(demo_labels.size());
}

double gold_share(std::span<const std::vector<LabelId>> demo_labels, std::span<const LabelId> golds) {
    if (demo_labels.size() != golds.size()) {
        throw std::invalid_argument("gold_share: misaligned inputs");
    }
    if (golds.empty()) {
        throw std::invalid_argument("gold_share: no test examples");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < golds.size(); ++i) {
        sum += gold_share(demo_labels[i], golds[i]);
    }
    return sum / static_cast<double>(golds.size());
}

double gold_share(std::span<const DemonstrationSet> demos, std::span<const LabelId> golds) {
    std::vector<std::vector<LabelId>> labels;
    labels.reserve(demos.size());
    for (const auto& set : demos) {
        auto& row = labels.emplace_back();
        for (const auto& demo : set.demos) {
            row.push_back(demo.example.gold);
        }
    }
    return gold_share(std::span<const std::vector<LabelId>>(labels), golds);
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw std::invalid_argument("pearson_r: misaligned inputs");
    }
    if (xs.size() < 2) {
        throw std::invalid_argument("pearson_r: need at least two points");
    }
    const auto n = static_cast<double>(xs.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw std::domain_error("pearson_r: correlation undefined for zero variance");
    }
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

MeanStd mean_stddev(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("mean_stddev: no values");
    }
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(values.size());
    if (values.size() < 2) {
        return {mean, std::nullopt};
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

}  // namespace ambig
