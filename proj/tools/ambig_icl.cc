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

// Command-line front end: run, replay, inspect, synth, embed.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ambig/benchmark.h"
#include "ambig/config.h"
#include "ambig/corpus.h"
#include "ambig/embedding.h"
#include "ambig/error.h"
#include "ambig/runner.h"

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
        out += (out.empty() ? "" : ",") + item;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ambiguity-aware demonstration selection for in-context classification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ambig::kVersion));

    auto* run = app.add_subcommand("run", "Run an experiment grid from a config file");
    std::string config_path;
    std::vector<std::string> strategies, shots;
    std::string seeds, order, out;
    std::size_t budget = 0, workers = 0;
    bool fail_fast = false, quiet = false;
    run->add_option("--config", config_path, "Experiment config (key = value)")->required()->check(CLI::ExistingFile);
    run->add_option("--strategy", strategies, "Strategy to run; repeatable, replaces the config list");
    run->add_option("--shots", shots, "Shot count; repeatable, replaces the config list");
    run->add_option("--seeds", seeds, "Comma-separated seeds");
    run->add_option("--budget", budget, "Candidate budget for the ambiguity stages");
    run->add_option("--order", order, "Demonstration order: shuffled or entropy");
    run->add_option("--out", out, "Output directory");
    run->add_option("--workers", workers, "Worker threads");
    run->add_flag("--fail-fast", fail_fast, "Abort on the first per-example failure");
    run->add_flag("--quiet", quiet, "Suppress progress output");

    auto* replay = app.add_subcommand("replay", "Verify a run and recompute its report");
    std::string run_dir;
    replay->add_option("--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

    auto* inspect = app.add_subcommand("inspect", "Show prompts, scores and selection traces for one example");
    std::string example_id;
    inspect->add_option("--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    inspect->add_option("--example", example_id, "Test example id")->required();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic benchmark with a ready-to-run config");
    ambig::SyntheticBenchmarkParams params;
    std::string synth_out;
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--labels", params.num_labels, "Number of labels")->capture_default_str();
    synth->add_option("--train", params.train_size, "Training examples")->capture_default_str();
    synth->add_option("--test", params.test_size, "Test examples")->capture_default_str();
    synth->add_option("--dim", params.retrieval_dim, "Retrieval embedding dimension")->capture_default_str();
    synth->add_option("--retrieval-noise", params.retrieval_noise, "Retrieval noise norm")->capture_default_str();
    synth->add_option("--train-noise", params.train_feature_noise, "Scorer feature noise, training split")
        ->capture_default_str();
    synth->add_option("--test-noise", params.test_feature_noise, "Scorer feature noise, test split")->capture_default_str();
    synth->add_option("--alpha", params.alpha, "Demonstration label bias of the scorer")->capture_default_str();
    synth->add_option("--sigma", params.sigma, "Scorer noise")->capture_default_str();
    synth->add_option("--seed", params.seed, "Generator seed")->capture_default_str();

    auto* embed = app.add_subcommand("embed", "Embed every example of a dataset into an EMB1 file");
    std::string dataset_dir, embed_out, backend = "hash", url;
    std::uint32_t dim = 256;
    embed->add_option("--dataset", dataset_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    embed->add_option("--out", embed_out, "Output file")->required();
    embed->add_option("--backend", backend, "hash or http")->check(CLI::IsMember({"hash", "http"}))->capture_default_str();
    embed->add_option("--dim", dim, "Hash embedding dimension")->capture_default_str();
    embed->add_option("--url", url, "Embedding endpoint for the http backend");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            auto config = ambig::load_config(config_path);
            const auto cwd = std::filesystem::current_path();
            if (!strategies.empty()) {
                config.set("strategies", join(strategies), cwd);
            }
            if (!shots.empty()) {
                config.set("shots", join(shots), cwd);
            }
            if (!seeds.empty()) {
                config.set("seeds", seeds, cwd);
            }
            if (budget != 0) {
                config.set("budget", std::to_string(budget), cwd);
            }
            if (!order.empty()) {
                config.set("order", order, cwd);
            }
            if (!out.empty()) {
                config.set("out", out, cwd);
            }
            if (workers != 0) {
                config.set("workers", std::to_string(workers), cwd);
            }
            if (fail_fast) {
                config.fail_fast = true;
            }
            ambig::apply_environment(config);
            const auto result = ambig::run_experiment(config, quiet ? nullptr : &std::cerr);
            std::cout << ambig::report_to_csv(result.report);
            return result.exit_code;
        }
        if (*replay) {
            ambig::replay_run(run_dir, &std::cerr);
            return 0;
        }
        if (*inspect) {
            ambig::inspect_example(run_dir, example_id, std::cout);
            return 0;
        }
        if (*synth) {
            ambig::write_synthetic_benchmark(ambig::make_synthetic_benchmark(params), synth_out);
            std::cerr << "wrote " << synth_out << "/experiment.conf\n";
            return 0;
        }
        if (*embed) {
            const auto dataset = ambig::load_dataset(dataset_dir);
            std::unique_ptr<ambig::EmbeddingBackend> embedder;
            if (backend == "http") {
                if (url.empty()) {
                    throw ambig::ConfigError("--backend http needs --url");
                }
                embedder = std::make_unique<ambig::HttpEmbedder>(ambig::HttpEndpoint{url});
            } else {
                embedder = std::make_unique<ambig::HashEmbedder>(dim);
            }
            std::vector<std::string> ids, texts;
            for (auto split : {ambig::Split::kTrain, ambig::Split::kDev, ambig::Split::kTest}) {
                for (const auto& example : dataset.split(split)) {
                    ids.push_back(example.id);
                    texts.push_back(example.text);
                }
            }
            const auto vectors = ambig::embed_with_backend(texts, *embedder);
            ambig::EmbeddingStore store(static_cast<std::uint32_t>(vectors.front().size()));
            for (std::size_t i = 0; i < ids.size(); ++i) {
                store.add(ids[i], vectors[i]);
            }
            ambig::write_store(embed_out, store);
            std::cerr << "embedded " << ids.size() << " examples with " << embedder->id() << '\n';
            return 0;
        }
    } catch (const ambig::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ambig::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ambig::exit_code_for(ambig::ErrorKind::kData);
    }
    return 0;
}
