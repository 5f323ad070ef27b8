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

#include "ambig/report.h"

#include <array>
#include <charconv>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ambig/error.h"
#include "ambig/hash.h"

namespace ambig {

using nlohmann::json;

namespace {

bool has_demos(Strategy strategy) { return strategy == Strategy::kStaticN || uses_shot_count(strategy); }

json optional_number(const std::optional<double>& value) { return value ? json(*value) : json(nullptr); }

json summary_json(const MeanStd& value) {
    return {{"mean", value.mean}, {"stddev", value.stddev ? json(*value.stddev) : json(nullptr)}};
}

json summary_json(const std::optional<MeanStd>& value) { return value ? summary_json(*value) : json(nullptr); }

std::vector<std::string> label_names(std::span<const LabelId> ids, const LabelSpace& labels) {
    std::vector<std::string> names;
    names.reserve(ids.size());
    for (auto id : ids) {
        names.push_back(labels.name(id));
    }
    return names;
}

std::vector<LabelId> label_ids(const json& names, const LabelSpace& labels) {
    std::vector<LabelId> ids;
    for (const auto& name : names) {
        ids.push_back(labels.at(name.get<std::string>()));
    }
    return ids;
}

std::optional<MeanStd> summarize(const std::vector<SeedMetrics>& seeds,
                                 std::optional<double> SeedMetrics::*field) {
    std::vector<double> values;
    for (const auto& s : seeds) {
        if (!(s.*field)) {
            return std::nullopt;
        }
        values.push_back(*(s.*field));
    }
    if (values.empty()) {
        return std::nullopt;
    }
    return mean_stddev(values);
}

}  // namespace

std::string Condition::name() const {
    std::string out(strategy_name(strategy));
    if (n_shots > 0) {
        out += "-" + std::to_string(n_shots);
    }
    return out;
}

json record_to_json(const ExampleRecord& record, const LabelSpace& labels) {
    json out = {{"condition", record.condition},
                {"seed", record.seed},
                {"id", record.example_id},
                {"gold", labels.name(record.gold)},
                {"predicted", labels.name(record.predicted)},
                {"demos", record.demo_ids},
                {"demo_labels", label_names(record.demo_labels, labels)},
                {"retrieved_labels", label_names(record.retrieved_labels, labels)}};
    out["scores"] = record.scores ? json(*record.scores) : json(nullptr);
    out["entropy_bits"] = optional_number(record.entropy_bits);
    out["prompt_hash"] = record.prompt_hash ? json(to_hex(*record.prompt_hash)) : json(nullptr);
    out["stage"] = record.stage ? json(std::string(stage_name(*record.stage))) : json(nullptr);
    return out;
}

ExampleRecord record_from_json(const json& in, const LabelSpace& labels) {
    ExampleRecord record;
    record.condition = in.at("condition").get<std::string>();
    record.seed = in.at("seed").get<std::uint64_t>();
    record.example_id = in.at("id").get<std::string>();
    record.gold = labels.at(in.at("gold").get<std::string>());
    record.predicted = labels.at(in.at("predicted").get<std::string>());
    record.demo_ids = in.at("demos").get<std::vector<std::string>>();
    record.demo_labels = label_ids(in.at("demo_labels"), labels);
    record.retrieved_labels = label_ids(in.at("retrieved_labels"), labels);
    if (!in.at("scores").is_null()) {
        record.scores = in.at("scores").get<std::vector<double>>();
        if (record.scores->size() != labels.size() || predict(*record.scores) != record.predicted) {
            throw DataError("record '" + record.example_id + "' scores disagree with its prediction");
        }
    }
    if (!in.at("entropy_bits").is_null()) {
        record.entropy_bits = in.at("entropy_bits").get<double>();
    }
    if (!in.at("prompt_hash").is_null()) {
        const auto hash = parse_hex(in.at("prompt_hash").get<std::string>());
        if (!hash) {
            throw DataError("record '" + record.example_id + "' has a bad prompt_hash");
        }
        record.prompt_hash = *hash;
    }
    if (!in.at("stage").is_null()) {
        record.stage = parse_stage(in.at("stage").get<std::string>());
        if (!record.stage) {
            throw DataError("record '" + record.example_id + "' has an unknown stage");
        }
    }
    if (record.demo_ids.size() != record.demo_labels.size()) {
        throw DataError("record '" + record.example_id + "' has misaligned demo ids and labels");
    }
    return record;
}

json selection_to_json(const SelectionRecord& record, const LabelSpace& labels) {
    json demos = json::array();
    for (const auto& demo : record.outcome.demos.demos) {
        demos.push_back({{"id", demo.example.id},
                         {"label", labels.name(demo.example.gold)},
                         {"provenance", std::string(stage_name(demo.provenance))},
                         {"rank", demo.rank}});
    }
    return {{"condition", record.condition},
            {"id", record.example_id},
            {"stage", std::string(stage_name(record.outcome.satisfied_stage))},
            {"candidates_scanned", record.outcome.candidates_scanned},
            {"short_fill", record.outcome.short_fill},
            {"demos", demos}};
}

EvaluationReport aggregate_report(const std::string& dataset, const LabelSpace& labels,
                                  const std::vector<Condition>& conditions, const std::vector<std::uint64_t>& seeds,
                                  const std::vector<ExampleRecord>& records,
                                  const std::optional<GoldInAmbigRate>& gold_in_ambig) {
    std::map<std::pair<std::string, std::uint64_t>, std::vector<const ExampleRecord*>> cells;
    for (const auto& record : records) {
        cells[{record.condition, record.seed}].push_back(&record);
    }
    EvaluationReport report{dataset, labels, {}, gold_in_ambig, std::nullopt, std::nullopt};
    for (const auto& condition : conditions) {
        const auto name = condition.name();
        ConditionReport cr{condition, {}, {}, {}, {}, {}, {}, {}, {}};
        for (auto seed : seeds) {
            const auto it = cells.find({name, seed});
            if (it == cells.end()) {
                continue;
            }
            const auto& cell = it->second;
            ConfusionMatrix matrix(labels.size());
            double entropy_sum = 0.0, share_sum = 0.0, retrieved_sum = 0.0;
            bool all_entropy = true;
            for (const auto* r : cell) {
                matrix.add(r->gold, r->predicted);
                if (r->entropy_bits) {
                    entropy_sum += *r->entropy_bits;
                } else {
                    all_entropy = false;
                }
                share_sum += gold_share(r->demo_labels, r->gold);
                retrieved_sum += gold_share(r->retrieved_labels, r->gold);
            }
            const auto count = static_cast<double>(cell.size());
            SeedMetrics sm{seed, cell.size(), classification_scores(matrix), std::nullopt, std::nullopt, std::nullopt,
                           matrix};
            if (all_entropy) {
                sm.mean_entropy_bits = entropy_sum / count;
            }
            if (has_demos(condition.strategy)) {
                sm.gold_share = share_sum / count;
            }
            if (uses_shot_count(condition.strategy)) {
                sm.gold_share_retrieved = retrieved_sum / count;
            }
            cr.seeds.push_back(std::move(sm));
        }
        if (cr.seeds.empty()) {
            continue;
        }
        std::vector<double> f1, precision, recall, accuracy;
        for (const auto& s : cr.seeds) {
            f1.push_back(s.scores.f1_macro);
            precision.push_back(s.scores.precision_macro);
            recall.push_back(s.scores.recall_macro);
            accuracy.push_back(s.scores.accuracy);
        }
        cr.f1_macro = mean_stddev(f1);
        cr.precision_macro = mean_stddev(precision);
        cr.recall_macro = mean_stddev(recall);
        cr.accuracy = mean_stddev(accuracy);
        cr.mean_entropy_bits = summarize(cr.seeds, &SeedMetrics::mean_entropy_bits);
        cr.gold_share = summarize(cr.seeds, &SeedMetrics::gold_share);
        cr.gold_share_retrieved = summarize(cr.seeds, &SeedMetrics::gold_share_retrieved);
        report.conditions.push_back(std::move(cr));
    }

    std::vector<double> f1s, entropies;
    for (const auto& cr : report.conditions) {
        if (cr.mean_entropy_bits) {
            f1s.push_back(cr.f1_macro.mean);
            entropies.push_back(cr.mean_entropy_bits->mean);
        }
    }
    if (f1s.size() < 2) {
        report.pearson_note = "fewer than two conditions report an entropy";
    } else {
        try {
            report.pearson_f1_entropy = pearson_r(f1s, entropies);
        } catch (const std::domain_error& e) {
            report.pearson_note = e.what();
        }
    }
    return report;
}

json report_to_json(const EvaluationReport& report) {
    json out;
    out["dataset"] = report.dataset;
    out["labels"] = report.labels.names();
    if (report.gold_in_ambig) {
        json per_label = json::object();
        json support = json::object();
        for (std::size_t l = 0; l < report.labels.size(); ++l) {
            const auto& name = report.labels.name(label_at(l));
            per_label[name] = optional_number(report.gold_in_ambig->per_label[l]);
            support[name] = report.gold_in_ambig->support[l];
        }
        out["gold_in_ambig"] = {{"overall", report.gold_in_ambig->overall}, {"per_label", per_label}, {"support", support}};
    } else {
        out["gold_in_ambig"] = nullptr;
    }
    out["pearson_f1_entropy"] = optional_number(report.pearson_f1_entropy);
    if (report.pearson_note) {
        out["pearson_note"] = *report.pearson_note;
    }
    json conditions = json::array();
    for (const auto& cr : report.conditions) {
        json seeds = json::array();
        for (const auto& s : cr.seeds) {
            json grid = json::array();
            for (std::size_t g = 0; g < report.labels.size(); ++g) {
                json row = json::array();
                for (std::size_t p = 0; p < report.labels.size(); ++p) {
                    row.push_back(s.confusion.at(label_at(g), label_at(p)));
                }
                grid.push_back(std::move(row));
            }
            seeds.push_back({{"seed", s.seed},
                             {"evaluated", s.evaluated},
                             {"f1_macro", s.scores.f1_macro},
                             {"precision_macro", s.scores.precision_macro},
                             {"recall_macro", s.scores.recall_macro},
                             {"accuracy", s.scores.accuracy},
                             {"mean_entropy_bits", optional_number(s.mean_entropy_bits)},
                             {"gold_share", optional_number(s.gold_share)},
                             {"gold_share_retrieved", optional_number(s.gold_share_retrieved)},
                             {"per_class", {{"precision", s.scores.precision}, {"recall", s.scores.recall}, {"f1", s.scores.f1}}},
                             {"confusion", std::move(grid)}});
        }
        conditions.push_back({{"name", cr.condition.name()},
                              {"strategy", std::string(strategy_name(cr.condition.strategy))},
                              {"n_shots", cr.condition.n_shots},
                              {"summary",
                               {{"f1_macro", summary_json(cr.f1_macro)},
                                {"precision_macro", summary_json(cr.precision_macro)},
                                {"recall_macro", summary_json(cr.recall_macro)},
                                {"accuracy", summary_json(cr.accuracy)},
                                {"mean_entropy_bits", summary_json(cr.mean_entropy_bits)},
                                {"gold_share", summary_json(cr.gold_share)},
                                {"gold_share_retrieved", summary_json(cr.gold_share_retrieved)}}},
                              {"seeds", std::move(seeds)}});
    }
    out["conditions"] = std::move(conditions);
    return out;
}

std::string format_double(double value) {
    std::array<char, 32> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_double failed");
    }
    return std::string(buffer.data(), ptr);
}

std::string report_to_csv(const EvaluationReport& report) {
    const auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    const auto std_cell = [](const std::optional<MeanStd>& v) {
        return v && v->stddev ? format_double(*v->stddev) : std::string();
    };
    std::ostringstream out;
    out << "condition,strategy,n_shots,seed,evaluated,f1_macro,precision_macro,recall_macro,accuracy,"
           "mean_entropy_bits,gold_share,gold_share_retrieved,f1_macro_std,precision_macro_std,recall_macro_std,"
           "accuracy_std,mean_entropy_bits_std,gold_share_std,gold_share_retrieved_std\n";
    for (const auto& cr : report.conditions) {
        const std::string prefix = cr.condition.name() + "," + std::string(strategy_name(cr.condition.strategy)) +
                                   "," + std::to_string(cr.condition.n_shots) + ",";
        std::size_t evaluated = 0;
        for (const auto& s : cr.seeds) {
            evaluated += s.evaluated;
            out << prefix << s.seed << ',' << s.evaluated << ',' << format_double(s.scores.f1_macro) << ','
                << format_double(s.scores.precision_macro) << ',' << format_double(s.scores.recall_macro) << ','
                << format_double(s.scores.accuracy) << ',' << cell(s.mean_entropy_bits) << ','
                << cell(s.gold_share) << ',' << cell(s.gold_share_retrieved) << ",,,,,,,\n";
        }
        const auto mean = [](const std::optional<MeanStd>& v) {
            return v ? format_double(v->mean) : std::string();
        };
        out << prefix << "aggregate," << evaluated << ',' << format_double(cr.f1_macro.mean) << ','
            << format_double(cr.precision_macro.mean) << ',' << format_double(cr.recall_macro.mean) << ','
            << format_double(cr.accuracy.mean) << ',' << mean(cr.mean_entropy_bits) << ',' << mean(cr.gold_share)
            << ',' << mean(cr.gold_share_retrieved) << ',' << std_cell(cr.f1_macro) << ','
            << std_cell(cr.precision_macro) << ',' << std_cell(cr.recall_macro) << ',' << std_cell(cr.accuracy)
            << ',' << std_cell(cr.mean_entropy_bits) << ',' << std_cell(cr.gold_share) << ','
            << std_cell(cr.gold_share_retrieved) << '\n';
    }
    return out.str();
}

std::string confusion_to_csv(const ConfusionMatrix& matrix, const LabelSpace& labels) {
    const auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) {
            return s;
        }
        std::string q = "\"";
        for (char c : s) {
            q += c == '"' ? std::string("\"\"") : std::string(1, c);
        }
        return q + "\"";
    };
    std::ostringstream out;
    out << "gold\\predicted";
    for (const auto& name : labels.names()) {
        out << ',' << quote(name);
    }
    out << '\n';
    for (std::size_t g = 0; g < labels.size(); ++g) {
        out << quote(labels.name(label_at(g)));
        for (std::size_t p = 0; p < labels.size(); ++p) {
            out << ',' << matrix.at(label_at(g), label_at(p));
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace ambig
