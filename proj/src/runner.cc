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

#include "ambig/runner.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <variant>

#include "ambig/benchmark.h"
#include "ambig/error.h"
#include "ambig/hash.h"
#include "ambig/metrics.h"
#include "ambig/parallel.h"
#include "ambig/prompting.h"
#include "ambig/selection.h"

namespace ambig {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr const char* kRecordsFile = "records.jsonl";
constexpr const char* kSelectionsFile = "selections.jsonl";
constexpr const char* kZeroShotTestFile = "zero_shot_test.jsonl";
constexpr const char* kZeroShotTrainFile = "zero_shot_train.jsonl";
constexpr const char* kManifestFile = "manifest.json";

struct Lines {
    std::string content;
    std::size_t count = 0;

    void add(const std::string& line) {
        content += line;
        content += '\n';
        ++count;
    }
};

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw DataError("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

FileDigest digest(std::string_view content) {
    return {to_hex(fnv1a64(content)), static_cast<std::size_t>(std::count(content.begin(), content.end(), '\n'))};
}

std::vector<std::string_view> split_lines(std::string_view content) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string_view::npos) {
            end = content.size();
        }
        lines.push_back(content.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

json condition_to_json(const Condition& c) {
    return {{"strategy", std::string(strategy_name(c.strategy))}, {"n_shots", c.n_shots}};
}

Condition condition_from_json(const json& j) {
    const auto name = j.at("strategy").get<std::string>();
    const auto strategy = parse_strategy(name);
    if (!strategy) {
        throw DataError("unknown strategy '" + name + "' in run manifest");
    }
    return {*strategy, j.at("n_shots").get<std::size_t>()};
}

std::optional<GoldInAmbigRate> gold_in_ambig_from(const ZeroShotTable& table) {
    std::vector<AmbiguousLabelSet> sets;
    std::vector<LabelId> golds;
    std::size_t num_labels = 0;
    for (const auto& entry : table.entries()) {
        if (entry.ambiguous) {
            sets.push_back(*entry.ambiguous);
            golds.push_back(entry.gold);
            num_labels = entry.record.scores.scores.size();
        }
    }
    if (sets.empty()) {
        return std::nullopt;
    }
    return gold_in_ambig_rate(sets, golds, num_labels);
}

struct Aggregates {
    std::vector<std::pair<std::filesystem::path, std::string>> files;
};

Aggregates render_aggregates(const EvaluationReport& report) {
    Aggregates out;
    out.files.emplace_back("report.json", report_to_json(report).dump(2) + "\n");
    out.files.emplace_back("report.csv", report_to_csv(report));
    for (const auto& condition : report.conditions) {
        for (const auto& seed : condition.seeds) {
            out.files.emplace_back(std::filesystem::path("confusion") /
                                       (condition.condition.name() + "_seed" + std::to_string(seed.seed) + ".csv"),
                                   confusion_to_csv(seed.confusion, report.labels));
        }
    }
    return out;
}

RunManifest read_manifest(const std::filesystem::path& run_dir) {
    try {
        return RunManifest::from_json(json::parse(read_text(run_dir / kManifestFile)));
    } catch (const json::exception& e) {
        throw DataError("malformed run manifest in " + run_dir.string() + ": " + e.what());
    }
}

std::vector<ExampleRecord> load_records(const std::string& content, const LabelSpace& labels) {
    std::vector<ExampleRecord> records;
    std::size_t line_no = 0;
    for (auto line : split_lines(content)) {
        ++line_no;
        try {
            records.push_back(record_from_json(json::parse(line), labels));
        } catch (const std::exception& e) {
            throw DataError(std::string(kRecordsFile) + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

// Maps input text to a feature row. Examples sharing a text must share a
// feature vector, otherwise the scorer could not tell them apart.
FeatureFn store_features(std::shared_ptr<const EmbeddingStore> store, const Dataset& dataset) {
    auto by_text = std::make_shared<std::unordered_map<std::string, std::size_t>>();
    for (Split split : {Split::kTrain, Split::kDev, Split::kTest}) {
        for (const auto& example : dataset.split(split)) {
            const auto row = store->find(example.id);
            if (!row) {
                continue;
            }
            const auto [it, inserted] = by_text->emplace(example.text, *row);
            if (!inserted) {
                const auto a = store->row(it->second), b = store->row(*row);
                if (!std::equal(a.begin(), a.end(), b.begin())) {
                    throw DataError("examples with identical text have different feature vectors ('" + example.id +
                                    "')");
                }
            }
        }
    }
    return [store, by_text](std::string_view text) {
        const auto it = by_text->find(std::string(text));
        if (it == by_text->end()) {
            throw DataError("no synthetic features for input text");
        }
        const auto row = store->row(it->second);
        return std::vector<float>(row.begin(), row.end());
    };
}

}  // namespace

int exit_code_for(ErrorKind kind) { return static_cast<int>(kind); }

json RunManifest::to_json() const {
    json conds = json::array();
    for (const auto& c : conditions) {
        conds.push_back(condition_to_json(c));
    }
    json file_digests = json::object();
    for (const auto& [name, d] : files) {
        file_digests[name] = {{"fnv1a64", d.fnv1a64}, {"lines", d.lines}};
    }
    json failure_list = json::array();
    for (const auto& f : failures) {
        failure_list.push_back({{"id", f.example_id}, {"message", f.message}, {"exit_code", exit_code_for(f.kind)}});
    }
    return {{"version", version},
            {"config", config_text},
            {"dataset", dataset},
            {"labels", labels},
            {"conditions", conds},
            {"seeds", seeds},
            {"backend", backend_id},
            {"scorer",
             {{"cache_hits", scorer_stats.cache_hits},
              {"backend_calls", scorer_stats.backend_calls},
              {"coalesced", scorer_stats.coalesced},
              {"cache_entries", cache_entries}}},
            {"fallback_histogram", fallback_histogram},
            {"timings_ms", timings_ms},
            {"files", file_digests},
            {"failures", failure_list}};
}

RunManifest RunManifest::from_json(const json& j) {
    RunManifest m;
    m.version = j.at("version").get<std::string>();
    m.config_text = j.at("config").get<std::string>();
    m.dataset = j.at("dataset").get<std::string>();
    m.labels = j.at("labels").get<std::vector<std::string>>();
    for (const auto& c : j.at("conditions")) {
        m.conditions.push_back(condition_from_json(c));
    }
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.backend_id = j.at("backend").get<std::string>();
    const auto& s = j.at("scorer");
    m.scorer_stats = {s.at("cache_hits").get<std::uint64_t>(), s.at("backend_calls").get<std::uint64_t>(),
                      s.at("coalesced").get<std::uint64_t>()};
    m.cache_entries = s.at("cache_entries").get<std::size_t>();
    m.fallback_histogram = j.at("fallback_histogram").get<std::map<std::string, std::map<std::string, std::size_t>>>();
    m.timings_ms = j.at("timings_ms").get<std::map<std::string, double>>();
    for (const auto& [name, d] : j.at("files").items()) {
        m.files[name] = {d.at("fnv1a64").get<std::string>(), d.at("lines").get<std::size_t>()};
    }
    for (const auto& f : j.at("failures")) {
        const int code = f.at("exit_code").get<int>();
        m.failures.push_back({f.at("id").get<std::string>(), f.at("message").get<std::string>(),
                              code == 1 ? ErrorKind::kConfig : code == 2 ? ErrorKind::kBackend : ErrorKind::kData});
    }
    return m;
}

std::vector<Condition> expand_conditions(const ExperimentConfig& config) {
    std::vector<Condition> out;
    for (auto strategy : config.strategies) {
        if (uses_shot_count(strategy)) {
            for (auto n : config.shots) {
                out.push_back({strategy, n});
            }
        } else {
            out.push_back({strategy, 0});
        }
    }
    // Duplicate strategies in the config collapse to one condition.
    std::vector<Condition> unique;
    for (const auto& c : out) {
        if (std::find(unique.begin(), unique.end(), c) == unique.end()) {
            unique.push_back(c);
        }
    }
    return unique;
}

std::unique_ptr<ScoringBackend> make_scoring_backend(const ExperimentConfig& config, const Dataset& dataset) {
    if (config.scorer == "http") {
        return std::make_unique<HttpScoringBackend>(config.endpoint);
    }
    const auto& syn = config.synthetic;
    FeatureFn features;
    std::string source_id;
    if (syn.features == "hash") {
        if (syn.hash_dim == 0) {
            throw ConfigError("synthetic_hash_dim must be positive");
        }
        auto embedder = std::make_shared<HashEmbedder>(syn.hash_dim);
        features = [embedder](std::string_view text) { return embedder->embed_one(text); };
        source_id = embedder->id();
    } else {
        const std::filesystem::path path = syn.features == "embeddings" ? config.embeddings : std::filesystem::path(syn.features);
        auto store = std::make_shared<const EmbeddingStore>(load_store(path, dataset));
        features = store_features(store, dataset);
        source_id = "store:" + to_hex(fnv1a64(read_text(path)));
    }

    SyntheticWeights weights;
    weights.alpha = syn.alpha;
    weights.sigma = syn.sigma;
    weights.seed = syn.seed;
    if (syn.weights == "centroid") {
        const std::size_t n = dataset.labels().size();
        std::vector<std::size_t> counts(n, 0);
        for (const auto& example : dataset.train()) {
            const auto f = features(example.text);
            if (weights.rows.empty()) {
                weights.rows.assign(n, std::vector<double>(f.size(), 0.0));
            }
            auto& target = weights.rows[index_of(example.gold)];
            for (std::size_t k = 0; k < f.size(); ++k) {
                target[k] += f[k];
            }
            ++counts[index_of(example.gold)];
        }
        for (std::size_t l = 0; l < n; ++l) {
            for (auto& v : weights.rows[l]) {
                v = counts[l] ? v / static_cast<double>(counts[l]) : 0.0;
            }
        }
    } else {
        weights.rows = load_weight_rows(syn.weights);
    }
    return std::make_unique<SyntheticBackend>(std::move(weights), std::move(features), source_id);
}

RunResult run_experiment(const ExperimentConfig& config_in, std::ostream* log) {
    ExperimentConfig config = config_in;
    config.validate();
    const auto started = Clock::now();
    auto note = [&](const std::string& message) {
        if (log != nullptr) {
            *log << message << '\n';
        }
    };
    auto fail = [&](std::vector<ExampleFailure>& failures, ExampleFailure failure) {
        if (config.fail_fast) {
            throw_error(failure.kind, failure.example_id + ": " + failure.message);
        }
        failures.push_back(std::move(failure));
    };

    RunManifest manifest;
    manifest.version = std::string(kVersion);
    manifest.config_text = config.to_text();
    manifest.seeds = config.seeds;
    manifest.conditions = expand_conditions(config);

    auto phase_start = Clock::now();
    const Dataset dataset = load_dataset(config.dataset);
    const auto& labels = dataset.labels();
    const auto& train = dataset.train();
    const auto& test = dataset.test();
    const auto& defn = dataset.task_definition();
    if (train.empty() || test.empty()) {
        throw DataError("dataset needs non-empty train and test splits");
    }
    manifest.dataset = dataset.name();
    manifest.labels = labels.names();

    bool need_retrieval = false, need_ambig = false, need_scorer = false, need_test_zero = false;
    bool need_static = false;
    std::size_t max_shots = 0;
    for (const auto& c : manifest.conditions) {
        need_retrieval |= uses_shot_count(c.strategy);
        need_ambig |= is_ambig(c.strategy);
        need_scorer |= c.strategy != Strategy::kFreq;
        need_test_zero |= c.strategy == Strategy::kZero || is_ambig(c.strategy);
        need_static |= c.strategy == Strategy::kStaticN;
        max_shots = std::max(max_shots, c.n_shots);
    }
    const bool entropy_order = config.order == OrderPolicy::kEntropyAscending;

    std::vector<RankedCandidates> ranked(test.size());
    if (need_retrieval) {
        const EmbeddingStore store = load_store(config.embeddings, dataset);
        std::vector<std::string> train_ids;
        for (const auto& example : train) {
            if (!store.find(example.id)) {
                throw DataError("training example '" + example.id + "' has no embedding");
            }
            train_ids.push_back(example.id);
        }
        for (const auto& example : test) {
            if (!store.find(example.id)) {
                throw DataError("test example '" + example.id + "' has no embedding");
            }
        }
        const EmbeddingStore pool = store.subset(train_ids);
        const std::size_t depth = std::min(config.retrieval_depth, pool.size());
        if (depth < max_shots) {
            throw DataError("training pool of " + std::to_string(pool.size()) + " is smaller than " +
                            std::to_string(max_shots) + " shots");
        }
        parallel_for(test.size(), config.workers,
                     [&](std::size_t i) { ranked[i] = rank_candidates(store.at(test[i].id), pool, depth, test[i].id); });
    }
    manifest.timings_ms["load_and_rank"] = elapsed_ms(phase_start);

    std::filesystem::create_directories(config.out);
    std::unique_ptr<ScoringBackend> backend;
    std::unique_ptr<ScoreCache> cache;
    std::unique_ptr<Scorer> scorer;
    if (need_scorer) {
        backend = make_scoring_backend(config, dataset);
        cache = std::make_unique<ScoreCache>(config.cache_path());
        scorer = std::make_unique<Scorer>(*backend, *cache);
        manifest.backend_id = backend->id();
    }

    std::vector<ExampleFailure> failures;
    const auto absorb = [&](std::vector<ExampleFailure>& pass_failures, const std::string& context) {
        for (auto& f : pass_failures) {
            f.message = context + ": " + f.message;
            failures.push_back(std::move(f));
        }
    };

    phase_start = Clock::now();
    ZeroShotTable test_table;
    if (need_test_zero) {
        std::vector<ExampleFailure> pass_failures;
        test_table = zero_shot_pass(test, defn, labels, *scorer, true, config.workers,
                                    config.fail_fast ? nullptr : &pass_failures);
        absorb(pass_failures, "zero-shot test pass");
        note("zero-shot test pass: " + std::to_string(test_table.size()) + " of " + std::to_string(test.size()) +
             " scored, accuracy " + format_double(test_table.size() ? test_table.accuracy() : 0.0));
    }
    manifest.timings_ms["zero_shot_test"] = elapsed_ms(phase_start);

    std::optional<DemonstrationSet> static_demos;
    if (need_static) {
        static_demos = select_static_n(dataset);
    }

    // Only pool members that can become demonstrations get a zero-shot pass.
    phase_start = Clock::now();
    ZeroShotTable train_table;
    const bool need_train_zero = need_ambig || (entropy_order && (need_retrieval || need_static));
    if (need_train_zero) {
        std::unordered_set<std::string> seen;
        std::vector<LabeledExample> pool_examples;
        const auto take = [&](const std::string& id) {
            if (seen.insert(id).second) {
                pool_examples.push_back(*dataset.find(Split::kTrain, id));
            }
        };
        for (const auto& r : ranked) {
            for (const auto& item : r.items) {
                take(item.id);
            }
        }
        if (static_demos) {
            for (const auto& demo : static_demos->demos) {
                take(demo.example.id);
            }
        }
        std::vector<ExampleFailure> pass_failures;
        train_table = zero_shot_pass(pool_examples, defn, labels, *scorer, false, config.workers,
                                     config.fail_fast ? nullptr : &pass_failures);
        absorb(pass_failures, "zero-shot train pass");
        note("zero-shot train pass: " + std::to_string(train_table.size()) + " pool examples");
    }
    manifest.timings_ms["zero_shot_train"] = elapsed_ms(phase_start);

    const LabelId majority = label_frequencies(train, labels).majority();

    phase_start = Clock::now();
    std::vector<ExampleRecord> records;
    Lines selection_lines;
    for (const auto& condition : manifest.conditions) {
        const std::string name = condition.name();
        const SelectionConfig selection_config{condition.strategy, condition.n_shots ? condition.n_shots : 1,
                                               config.candidate_budget, config.fallback_enabled};
        const bool needs_zero_entry = condition.strategy == Strategy::kZero || is_ambig(condition.strategy);

        std::vector<std::optional<StrategyResult>> results(test.size());
        std::vector<std::optional<ExampleFailure>> errors(test.size());
        parallel_for(test.size(), config.workers, [&](std::size_t i) {
            const auto* entry = test_table.find(test[i].id);
            if (needs_zero_entry && entry == nullptr) {
                return;  // already reported by the zero-shot pass
            }
            SelectionContext context;
            context.dataset = &dataset;
            context.ranked = need_retrieval ? &ranked[i] : nullptr;
            context.ambiguous = entry != nullptr && entry->ambiguous ? &*entry->ambiguous : nullptr;
            context.train_predictions = &train_table;
            context.majority = majority;
            context.static_demos = static_demos ? &*static_demos : nullptr;
            try {
                results[i] = select_for_strategy(test[i], context, selection_config);
            } catch (const std::exception& e) {
                errors[i] = ExampleFailure{test[i].id, name + " selection: " + e.what(), error_kind(e)};
            }
        });
        auto& histogram = manifest.fallback_histogram[name];
        for (std::size_t i = 0; i < test.size(); ++i) {
            if (errors[i]) {
                if (is_ambig(condition.strategy)) {
                    ++histogram["failed"];
                }
                fail(failures, std::move(*errors[i]));
                continue;
            }
            if (!results[i]) {
                if (is_ambig(condition.strategy)) {
                    ++histogram["failed"];
                }
                continue;
            }
            if (const auto* outcome = std::get_if<SelectionOutcome>(&*results[i])) {
                selection_lines.add(selection_to_json({name, test[i].id, *outcome}, labels).dump());
                if (is_ambig(condition.strategy)) {
                    ++histogram[std::string(stage_name(outcome->satisfied_stage))];
                    if (outcome->short_fill) {
                        ++histogram["short_fill"];
                    }
                }
            }
        }
        if (histogram.empty()) {
            manifest.fallback_histogram.erase(name);
        }

        for (auto seed : config.seeds) {
            std::vector<std::optional<ExampleRecord>> cell(test.size());
            std::fill(errors.begin(), errors.end(), std::nullopt);
            parallel_for(test.size(), config.workers, [&](std::size_t i) {
                if (!results[i]) {
                    return;
                }
                const auto& example = test[i];
                ExampleRecord record;
                record.condition = name;
                record.seed = seed;
                record.example_id = example.id;
                record.gold = example.gold;
                try {
                    if (const auto* freq = std::get_if<FreqPrediction>(&*results[i])) {
                        record.predicted = freq->label;
                    } else if (std::holds_alternative<ZeroShotMarker>(*results[i])) {
                        const auto& scores = test_table.at(example.id).record.scores;
                        record.scores = scores.scores;
                        record.prompt_hash = scores.prompt_hash;
                        record.predicted = predict(scores);
                        record.entropy_bits = entropy_bits(normalize(scores));
                    } else {
                        const auto& outcome = std::get<SelectionOutcome>(*results[i]);
                        const std::uint64_t order_seed = mix64(seed ^ fnv1a64(example.id));
                        DemonstrationSet ordered;
                        if (entropy_order) {
                            std::vector<double> entropies;
                            for (const auto& demo : outcome.demos.demos) {
                                entropies.push_back(entropy_bits(normalize(train_table.at(demo.example.id).record.scores)));
                            }
                            ordered = order_demos(outcome.demos, OrderPolicy::kEntropyAscending, order_seed,
                                                  std::span<const double>(entropies));
                        } else {
                            ordered = order_demos(outcome.demos, OrderPolicy::kShuffled, order_seed);
                        }
                        const auto prompt = build_few_shot(defn, ordered, labels, example.text);
                        const auto scores = scorer->score_labels(prompt, labels);
                        record.scores = scores.scores;
                        record.prompt_hash = scores.prompt_hash;
                        record.predicted = predict(scores);
                        record.entropy_bits = entropy_bits(normalize(scores));
                        for (const auto& demo : ordered.demos) {
                            record.demo_ids.push_back(demo.example.id);
                            record.demo_labels.push_back(demo.example.gold);
                        }
                        if (uses_shot_count(condition.strategy)) {
                            for (std::size_t k = 0; k < condition.n_shots && k < ranked[i].items.size(); ++k) {
                                record.retrieved_labels.push_back(dataset.find(Split::kTrain, ranked[i].items[k].id)->gold);
                            }
                        }
                        if (is_ambig(condition.strategy)) {
                            record.stage = outcome.satisfied_stage;
                        }
                    }
                    cell[i] = std::move(record);
                } catch (const std::exception& e) {
                    errors[i] = ExampleFailure{example.id, name + " seed " + std::to_string(seed) + ": " + e.what(),
                                               error_kind(e)};
                }
            });
            for (std::size_t i = 0; i < test.size(); ++i) {
                if (errors[i]) {
                    fail(failures, std::move(*errors[i]));
                } else if (cell[i]) {
                    records.push_back(std::move(*cell[i]));
                }
            }
        }
        note("condition " + name + " done");
    }
    manifest.timings_ms["conditions"] = elapsed_ms(phase_start);

    const auto gold_in_ambig = need_test_zero ? gold_in_ambig_from(test_table) : std::nullopt;
    EvaluationReport report =
        aggregate_report(dataset.name(), labels, manifest.conditions, config.seeds, records, gold_in_ambig);

    Lines record_lines;
    for (const auto& r : records) {
        record_lines.add(record_to_json(r, labels).dump());
    }
    const auto put = [&](const char* file, const std::string& content) {
        write_atomic(config.out / file, content);
        manifest.files[file] = digest(content);
    };
    put(kRecordsFile, record_lines.content);
    put(kSelectionsFile, selection_lines.content);
    const auto put_table = [&](const char* file, const ZeroShotTable& table) {
        auto tmp = config.out / file;
        tmp += ".tmp";
        table.save_jsonl(tmp, labels);
        std::filesystem::rename(tmp, config.out / file);
        manifest.files[file] = digest(read_text(config.out / file));
    };
    if (need_test_zero) {
        put_table(kZeroShotTestFile, test_table);
    }
    if (need_train_zero) {
        put_table(kZeroShotTrainFile, train_table);
    }
    for (const auto& [path, content] : render_aggregates(report).files) {
        write_atomic(config.out / path, content);
    }

    if (scorer) {
        manifest.scorer_stats = scorer->stats();
        manifest.cache_entries = cache->size();
    }
    manifest.failures = failures;
    manifest.timings_ms["total"] = elapsed_ms(started);
    write_atomic(config.out / kManifestFile, manifest.to_json().dump(2) + "\n");

    RunResult result{std::move(report), std::move(manifest), 0};
    if (!failures.empty()) {
        result.exit_code = exit_code_for(failures.front().kind);
        note(std::to_string(failures.size()) + " example failures; first: " + failures.front().example_id + ": " +
             failures.front().message);
    }
    return result;
}

EvaluationReport replay_run(const std::filesystem::path& run_dir, std::ostream* log) {
    const RunManifest manifest = read_manifest(run_dir);
    std::map<std::string, std::string> contents;
    for (const auto& [name, expected] : manifest.files) {
        const auto path = run_dir / name;
        if (!std::filesystem::exists(path)) {
            throw DataError("run file " + name + " is missing");
        }
        auto content = read_text(path);
        const auto actual = digest(content);
        if (actual.fnv1a64 != expected.fnv1a64 || actual.lines != expected.lines) {
            throw DataError("checksum mismatch for " + name + ": expected " + expected.fnv1a64 + " over " +
                            std::to_string(expected.lines) + " lines, found " + actual.fnv1a64 + " over " +
                            std::to_string(actual.lines));
        }
        contents[name] = std::move(content);
    }
    if (!contents.count(kRecordsFile)) {
        throw DataError("run manifest does not list " + std::string(kRecordsFile));
    }
    const LabelSpace labels(manifest.labels);
    const auto records = load_records(contents[kRecordsFile], labels);
    std::optional<GoldInAmbigRate> gold_in_ambig;
    if (contents.count(kZeroShotTestFile)) {
        gold_in_ambig = gold_in_ambig_from(ZeroShotTable::load_jsonl(run_dir / kZeroShotTestFile, labels));
    }
    EvaluationReport report =
        aggregate_report(manifest.dataset, labels, manifest.conditions, manifest.seeds, records, gold_in_ambig);

    const auto aggregates = render_aggregates(report);
    for (const auto& [path, content] : aggregates.files) {
        const auto full = run_dir / path;
        if (std::filesystem::exists(full)) {
            if (read_text(full) != content) {
                throw DataError("recomputed " + path.string() + " differs from the stored file");
            }
        } else {
            write_atomic(full, content);
            if (log != nullptr) {
                *log << "regenerated " << path.string() << '\n';
            }
        }
    }
    if (log != nullptr) {
        *log << "replay ok: " << records.size() << " records, " << report.conditions.size() << " conditions\n";
    }
    return report;
}

void inspect_example(const std::filesystem::path& run_dir, std::string_view example_id, std::ostream& out) {
    const RunManifest manifest = read_manifest(run_dir);
    const ExperimentConfig config = parse_config(manifest.config_text, run_dir);
    const Dataset dataset = load_dataset(config.dataset);
    const auto& labels = dataset.labels();
    const auto* example = dataset.find(Split::kTest, example_id);
    if (example == nullptr) {
        throw DataError("no test example '" + std::string(example_id) + "'");
    }
    const auto print_scores = [&](const std::vector<double>& scores) {
        for (std::size_t l = 0; l < scores.size(); ++l) {
            out << "  " << labels.name(label_at(l)) << ": " << format_double(scores[l]) << '\n';
        }
    };
    out << "example " << example->id << " (gold " << labels.name(example->gold) << ")\n"
        << "text: " << example->text << "\n\n";

    if (std::filesystem::exists(run_dir / kZeroShotTestFile)) {
        const auto table = ZeroShotTable::load_jsonl(run_dir / kZeroShotTestFile, labels);
        if (const auto* entry = table.find(example->id)) {
            out << "zero-shot prediction: " << labels.name(entry->record.predicted) << '\n';
            print_scores(entry->record.scores.scores);
            if (entry->ambiguous) {
                out << "ambiguous label set: {" << labels.name(entry->ambiguous->first) << ", "
                    << labels.name(entry->ambiguous->second) << "}"
                    << (entry->ambiguous->contains(example->gold) ? " contains gold" : " misses gold") << '\n';
            }
            out << '\n';
        }
    }

    const std::string selections = read_text(run_dir / kSelectionsFile);
    for (auto line : split_lines(selections)) {
        const auto sel = json::parse(line);
        if (sel.at("id") != example->id) {
            continue;
        }
        out << "selection " << sel.at("condition").get<std::string>() << ": stage "
            << sel.at("stage").get<std::string>() << ", scanned " << sel.at("candidates_scanned").get<std::size_t>()
            << (sel.at("short_fill").get<bool>() ? ", short fill" : "") << '\n';
        for (const auto& demo : sel.at("demos")) {
            out << "  rank " << demo.at("rank").get<std::size_t>() << " " << demo.at("id").get<std::string>() << " ("
                << demo.at("label").get<std::string>() << ", " << demo.at("provenance").get<std::string>() << ")\n";
        }
    }
    out << '\n';

    const std::string records = read_text(run_dir / kRecordsFile);
    for (auto line : split_lines(records)) {
        const auto j = json::parse(line);
        if (j.at("id") != example->id) {
            continue;
        }
        const auto record = record_from_json(j, labels);
        out << "== " << record.condition << " seed " << record.seed << ": predicted "
            << labels.name(record.predicted) << '\n';
        if (!record.prompt_hash) {
            out << '\n';
            continue;
        }
        std::string prompt;
        if (record.demo_ids.empty()) {
            prompt = build_zero_shot(dataset.task_definition(), example->text);
        } else {
            std::vector<Demonstration> demos;
            for (const auto& id : record.demo_ids) {
                const auto* demo = dataset.find(Split::kTrain, id);
                if (demo == nullptr) {
                    throw DataError("record demo '" + id + "' is not a training example");
                }
                demos.push_back({*demo, Stage::kRetr, 0});
            }
            prompt = build_few_shot(dataset.task_definition(), demos, labels, example->text);
        }
        if (fnv1a64(prompt) != *record.prompt_hash) {
            throw DataError("rebuilt prompt for " + record.condition + " seed " + std::to_string(record.seed) +
                            " does not match the recorded hash " + to_hex(*record.prompt_hash));
        }
        out << "prompt (hash " << to_hex(*record.prompt_hash) << " verified):\n" << prompt << "\nscores";
        if (record.entropy_bits) {
            out << " (entropy " << format_double(*record.entropy_bits) << " bits)";
        }
        out << ":\n";
        if (record.scores) {
            print_scores(*record.scores);
        }
        out << '\n';
    }
}

}  // namespace ambig
