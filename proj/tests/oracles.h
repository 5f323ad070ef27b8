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

// Independent reference implementations used only by tests. They follow the
// textbook definitions as directly as possible and share no code with the
// library beyond its plain data types.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline double entropy_bits(const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p) {
        if (x > 0.0) {
            h -= x * (std::log(x) / std::log(2.0));
        }
    }
    return h;
}

inline std::size_t argmax(const std::vector<double>& s) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        bool beats_all_before = true;
        for (std::size_t j = 0; j < i; ++j) {
            if (s[j] >= s[i]) {
                beats_all_before = false;
            }
        }
        bool at_least_all_after = true;
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            if (s[j] > s[i]) {
                at_least_all_after = false;
            }
        }
        if (beats_all_before && at_least_all_after) {
            best = i;
            break;
        }
    }
    return best;
}

// Sort label indices by (score desc, index asc) and take the first two.
inline std::pair<std::size_t, std::size_t> top2(const std::vector<double>& s) {
    std::vector<std::size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return s[a] > s[b] || (s[a] == s[b] && a < b);
    });
    return {idx[0], idx[1]};
}

struct Scores {
    double precision_macro = 0, recall_macro = 0, f1_macro = 0, accuracy = 0;
};

// Per-class precision/recall/F1 from raw (gold, predicted) pairs.
inline Scores classification(const std::vector<std::size_t>& golds, const std::vector<std::size_t>& preds,
                             std::size_t n) {
    Scores out;
    std::size_t correct = 0;
    for (std::size_t c = 0; c < n; ++c) {
        long double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < golds.size(); ++i) {
            if (golds[i] == c && preds[i] == c) {
                tp += 1;
            } else if (golds[i] != c && preds[i] == c) {
                fp += 1;
            } else if (golds[i] == c && preds[i] != c) {
                fn += 1;
            }
        }
        const long double p = tp + fp > 0 ? tp / (tp + fp) : 0;
        const long double r = tp + fn > 0 ? tp / (tp + fn) : 0;
        const long double f = p + r > 0 ? 2 * p * r / (p + r) : 0;
        out.precision_macro += static_cast<double>(p / n);
        out.recall_macro += static_cast<double>(r / n);
        out.f1_macro += static_cast<double>(f / n);
    }
    for (std::size_t i = 0; i < golds.size(); ++i) {
        correct += golds[i] == preds[i] ? 1 : 0;
    }
    out.accuracy = static_cast<double>(correct) / static_cast<double>(golds.size());
    return out;
}

// Computational form: (nΣxy − ΣxΣy) / sqrt((nΣx² − (Σx)²)(nΣy² − (Σy)²)).
inline double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    const long double n = static_cast<long double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const long double x = xs[i], y = ys[i];
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    return static_cast<double>((n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy)));
}

struct Ranked {
    std::string id;
    double score;
};

// Score every row, sort everything, keep a prefix.
inline std::vector<Ranked> knn(const std::vector<float>& query, const std::vector<std::vector<float>>& rows,
                               const std::vector<std::string>& ids, std::size_t depth) {
    std::vector<Ranked> all;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double dot = 0.0;
        for (std::size_t k = 0; k < query.size(); ++k) {
            dot += static_cast<double>(query[k]) * static_cast<double>(rows[r][k]);
        }
        all.push_back({ids[r], dot});
    }
    std::sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b) {
        return a.score > b.score || (a.score == b.score && a.id < b.id);
    });
    all.resize(depth);
    return all;
}

enum class Stage { kRetr = 1, kGold = 2, kGoldMis = 3, kGoldMisPred = 4 };

struct PoolItem {
    std::string id;
    std::size_t gold;
    std::size_t pred;
    std::size_t rank;
};

struct Selection {
    std::vector<std::string> ids;
    Stage stage;
    bool short_fill;
    std::size_t scanned;
};

// Filter-then-prefix at one stage.
inline Selection select_stage(const std::vector<PoolItem>& items, std::size_t a, std::size_t b, Stage stage,
                              std::size_t n, std::size_t budget) {
    const auto in_ambig = [&](std::size_t l) { return l == a || l == b; };
    std::vector<PoolItem> pool;
    std::size_t unfilled_scan = items.empty() ? 0 : items.back().rank;
    if (stage == Stage::kRetr) {
        pool = items;
    } else if (stage == Stage::kGold) {
        pool.assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(std::min(budget, items.size())));
        unfilled_scan = pool.empty() ? 0 : pool.back().rank;
    } else {
        for (const auto& item : items) {
            if (item.pred != item.gold && pool.size() < budget) {
                pool.push_back(item);
            }
        }
        if (pool.size() == budget && budget > 0) {
            unfilled_scan = pool.back().rank;
        }
    }
    std::vector<PoolItem> admitted;
    for (const auto& item : pool) {
        bool ok = true;
        if (stage != Stage::kRetr) {
            ok = in_ambig(item.gold);
        }
        if (stage == Stage::kGoldMisPred) {
            ok = ok && in_ambig(item.pred);
        }
        if (ok) {
            admitted.push_back(item);
        }
    }
    Selection out;
    out.stage = stage;
    out.short_fill = admitted.size() < n;
    if (admitted.size() > n) {
        admitted.resize(n);
    }
    for (const auto& item : admitted) {
        out.ids.push_back(item.id);
    }
    out.scanned = out.short_fill ? unfilled_scan : admitted.back().rank;
    return out;
}

inline Selection select(const std::vector<PoolItem>& items, std::size_t a, std::size_t b, Stage requested,
                        std::size_t n, std::size_t budget, bool fallback) {
    const Stage weakest = fallback ? Stage::kRetr : requested;
    for (int s = static_cast<int>(requested);; --s) {
        auto out = select_stage(items, a, b, static_cast<Stage>(s), n, budget);
        if (!out.short_fill || static_cast<Stage>(s) == weakest) {
            return out;
        }
    }
}

}  // namespace oracle
