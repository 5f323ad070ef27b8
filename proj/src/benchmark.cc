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

#include "ambig/benchmark.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ambig/ambiguity.h"
#include "ambig/error.h"
#include "ambig/hash.h"
#include "ambig/prompting.h"
#include "ambig/random.h"
#include "json.hpp"

namespace ambig {

namespace {

std::vector<std::string> label_names(std::size_t n) {
    if (n == 5) {
        return {"great", "good", "okay", "bad", "terrible"};
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back("label_" + std::to_string(i));
    }
    return names;
}

std::string task_definition(const std::vector<std::string>& names) {
    std::string defn = "Classify the synthetic input into one of the following labels: ";
    for (std::size_t i = 0; i < names.size(); ++i) {
        defn += (i ? ", " : "") + names[i];
    }
    return defn + ".";
}

std::string pad(std::size_t i) {
    std::string s = std::to_string(i);
    return std::string(s.size() < 5 ? 5 - s.size() : 0, '0') + s;
}

std::vector<float> gaussian_vector(std::uint64_t seed, std::uint64_t key, std::size_t dim, double scale) {
    std::vector<float> v(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        v[k] = static_cast<float>(scale * counter_gaussian(seed, key, k));
    }
    return v;
}

}  // namespace

SyntheticBenchmark make_synthetic_benchmark(const SyntheticBenchmarkParams& params) {
    const std::size_t n = params.num_labels;
    if (n < 2 || params.train_size == 0 || params.test_size == 0 || params.retrieval_dim == 0) {
        throw std::invalid_argument("make_synthetic_benchmark: empty benchmark");
    }
    if (params.confusable_a >= n || params.confusable_b >= n || params.confusable_a == params.confusable_b) {
        throw std::invalid_argument("make_synthetic_benchmark: bad confusable pair");
    }
    const auto names = label_names(n);
    LabelSpace labels(names);
    const std::string defn = task_definition(names);

    SyntheticWeights weights;
    weights.alpha = params.alpha;
    weights.sigma = params.sigma;
    weights.seed = params.seed;
    weights.rows.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t l = 0; l < n; ++l) {
        weights.rows[l][l] = 1.0;
    }
    weights.rows[params.confusable_a][params.confusable_b] = params.confusable_overlap;
    weights.rows[params.confusable_b][params.confusable_a] = params.confusable_overlap;

    // Unit-norm label centroids in retrieval space.
    std::vector<std::vector<float>> centroids;
    for (std::size_t l = 0; l < n; ++l) {
        auto c = gaussian_vector(params.seed, fnv1a64("centroid:" + std::to_string(l)), params.retrieval_dim, 1.0);
        double norm = 0.0;
        for (float x : c) {
            norm += static_cast<double>(x) * x;
        }
        for (float& x : c) {
            x = static_cast<float>(x / std::sqrt(norm));
        }
        centroids.push_back(std::move(c));
    }
    const double retrieval_scale = params.retrieval_noise / std::sqrt(static_cast<double>(params.retrieval_dim));

    EmbeddingStore retrieval(params.retrieval_dim);
    EmbeddingStore features(static_cast<std::uint32_t>(n));
    std::vector<LabeledExample> train, test;

    const auto make_split = [&](std::string_view split, std::size_t size, double feature_noise,
                                std::vector<LabeledExample>& out, bool require_ambiguous) {
        for (std::size_t i = 0; i < size; ++i) {
            const std::string id = std::string(split) + "-" + pad(i);
            const std::uint64_t key = fnv1a64(id);
            const auto gold = label_at(mix64(params.seed ^ key) % n);
            LabeledExample example{id, "synthetic " + std::string(split) + " item " + std::to_string(i), gold};

            auto r = gaussian_vector(params.seed, key ^ 0x5245545249455645ULL, params.retrieval_dim, retrieval_scale);
            for (std::size_t k = 0; k < r.size(); ++k) {
                r[k] += centroids[index_of(gold)][k];
            }
            retrieval.add(id, r);

            std::vector<float> f;
            for (std::uint64_t attempt = 0;; ++attempt) {
                f = gaussian_vector(params.seed, mix64(key + attempt), n, feature_noise);
                f[index_of(gold)] += static_cast<float>(params.feature_scale);
                if (!require_ambiguous) {
                    break;
                }
                const std::vector<std::size_t> no_demos(n, 0);
                const auto scores =
                    synthetic_score(f, no_demos, weights, fnv1a64(build_zero_shot(defn, example.text)));
                if (ambiguous_set(scores).contains(gold)) {
                    break;
                }
                if (attempt == 10000) {
                    throw std::runtime_error("make_synthetic_benchmark: cannot place gold in the ambiguous set");
                }
            }
            features.add(id, f);
            out.push_back(std::move(example));
        }
    };
    make_split("train", params.train_size, params.train_feature_noise, train, false);
    make_split("test", params.test_size, params.test_feature_noise, test, true);

    return {Dataset("synthetic", std::move(labels), defn, std::move(train), {}, std::move(test)),
            std::move(retrieval), std::move(features), std::move(weights)};
}

void write_synthetic_benchmark(const SyntheticBenchmark& bench, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_dataset(bench.dataset, dir / "data");
    write_store(dir / "embeddings.emb", bench.retrieval);
    write_store(dir / "features.emb", bench.features);
    {
        std::ofstream out(dir / "weights.json", std::ios::binary | std::ios::trunc);
        out << nlohmann::json{{"rows", bench.weights.rows}}.dump() << '\n';
        if (!out) {
            throw DataError("failed writing " + (dir / "weights.json").string());
        }
    }
    std::ostringstream conf;
    conf.precision(17);
    conf << "# generated synthetic benchmark\n"
         << "dataset = data\n"
         << "embeddings = embeddings.emb\n"
         << "scorer = synthetic\n"
         << "synthetic_weights = weights.json\n"
         << "synthetic_features = features.emb\n"
         << "synthetic_alpha = " << bench.weights.alpha << "\n"
         << "synthetic_sigma = " << bench.weights.sigma << "\n"
         << "synthetic_seed = " << bench.weights.seed << "\n"
         << "strategies = freq,zero,static_n,retr,ambig_gold,ambig_gold_mis,ambig_gold_mis_pred\n"
         << "shots = 4,8\n"
         << "seeds = 0,1,2\n"
         << "budget = 250\n"
         << "retrieval_depth = 250\n"
         << "order = shuffled\n"
         << "out = run\n";
    std::ofstream out(dir / "experiment.conf", std::ios::binary | std::ios::trunc);
    out << conf.str();
    if (!out) {
        throw DataError("failed writing " + (dir / "experiment.conf").string());
    }
}

std::vector<std::vector<double>> load_weight_rows(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read weights file '" + path.string() + "'");
    }
    try {
        const auto doc = nlohmann::json::parse(in);
        const auto& rows = doc.is_object() ? doc.at("rows") : doc;
        auto out = rows.get<std::vector<std::vector<double>>>();
        if (out.empty() || out.front().empty()) {
            throw ConfigError("weights file '" + path.string() + "' is empty");
        }
        for (const auto& row : out) {
            if (row.size() != out.front().size()) {
                throw ConfigError("weights file '" + path.string() + "' has ragged rows");
            }
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed weights file '" + path.string() + "': " + e.what());
    }
}

}  // namespace ambig
