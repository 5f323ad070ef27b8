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

#include "ambig/config.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ambig/error.h"
#include "ambig/report.h"

namespace ambig {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view value) {
    std::vector<std::string_view> items;
    std::size_t start = 0;
    while (start <= value.size()) {
        auto end = value.find(',', start);
        if (end == std::string_view::npos) {
            end = value.size();
        }
        const auto item = trim(value.substr(start, end - start));
        if (!item.empty()) {
            items.push_back(item);
        }
        start = end + 1;
    }
    return items;
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw ConfigError("invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

std::filesystem::path resolve(std::string_view value, const std::filesystem::path& base_dir) {
    std::filesystem::path p{std::string(value)};
    if (p.is_relative()) {
        p = base_dir / p;
    }
    return p.lexically_normal();
}

// Keeps keywords such as "centroid" or "hash" verbatim, resolves paths.
std::string keyword_or_path(std::string_view value, std::initializer_list<std::string_view> keywords,
                            const std::filesystem::path& base_dir) {
    for (auto keyword : keywords) {
        if (value == keyword) {
            return std::string(value);
        }
    }
    return resolve(value, base_dir).string();
}

template <class T>
std::string join(const std::vector<T>& items) {
    std::ostringstream out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        out << (i ? "," : "") << items[i];
    }
    return out.str();
}

}  // namespace

void ExperimentConfig::set(std::string_view key, std::string_view value, const std::filesystem::path& base_dir) {
    if (key == "dataset") {
        dataset = resolve(value, base_dir);
    } else if (key == "embeddings") {
        embeddings = resolve(value, base_dir);
    } else if (key == "scorer") {
        if (value != "synthetic" && value != "http") {
            throw ConfigError("scorer must be 'synthetic' or 'http'");
        }
        scorer = std::string(value);
    } else if (key == "scorer_url") {
        endpoint.url = std::string(value);
    } else if (key == "scorer_timeout_ms") {
        endpoint.timeout_ms = parse_number<int>(key, value);
    } else if (key == "scorer_retries") {
        endpoint.retries = parse_number<int>(key, value);
    } else if (key == "synthetic_weights") {
        synthetic.weights = keyword_or_path(value, {"centroid"}, base_dir);
    } else if (key == "synthetic_features") {
        synthetic.features = keyword_or_path(value, {"embeddings", "hash"}, base_dir);
    } else if (key == "synthetic_hash_dim") {
        synthetic.hash_dim = parse_number<std::uint32_t>(key, value);
    } else if (key == "synthetic_alpha") {
        synthetic.alpha = parse_number<double>(key, value);
    } else if (key == "synthetic_sigma") {
        synthetic.sigma = parse_number<double>(key, value);
    } else if (key == "synthetic_seed") {
        synthetic.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "strategies") {
        strategies.clear();
        for (auto item : split_list(value)) {
            const auto s = parse_strategy(item);
            if (!s) {
                throw ConfigError("unknown strategy '" + std::string(item) + "'");
            }
            strategies.push_back(*s);
        }
    } else if (key == "shots") {
        shots.clear();
        for (auto item : split_list(value)) {
            shots.push_back(parse_number<std::size_t>(key, item));
        }
    } else if (key == "seeds") {
        seeds.clear();
        for (auto item : split_list(value)) {
            seeds.push_back(parse_number<std::uint64_t>(key, item));
        }
    } else if (key == "budget") {
        candidate_budget = parse_number<std::size_t>(key, value);
    } else if (key == "retrieval_depth") {
        retrieval_depth = parse_number<std::size_t>(key, value);
    } else if (key == "fallback") {
        fallback_enabled = parse_bool(key, value);
    } else if (key == "order") {
        const auto policy = parse_order_policy(value);
        if (!policy || *policy == OrderPolicy::kRank) {
            throw ConfigError("order must be 'shuffled' or 'entropy'");
        }
        order = *policy;
    } else if (key == "out") {
        out = resolve(value, base_dir);
    } else if (key == "cache") {
        cache = resolve(value, base_dir);
    } else if (key == "workers") {
        workers = parse_number<std::size_t>(key, value);
    } else if (key == "fail_fast") {
        fail_fast = parse_bool(key, value);
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

void ExperimentConfig::validate() const {
    if (strategies.empty()) {
        throw ConfigError("no strategies configured");
    }
    if (seeds.empty()) {
        throw ConfigError("no seeds configured");
    }
    bool needs_shots = false, needs_embeddings = false, needs_scorer = false;
    for (auto s : strategies) {
        needs_shots |= uses_shot_count(s);
        needs_embeddings |= uses_shot_count(s);
        needs_scorer |= s != Strategy::kFreq;
    }
    if (needs_shots && shots.empty()) {
        throw ConfigError("no shot counts configured");
    }
    for (auto n : shots) {
        if (n == 0) {
            throw ConfigError("shot counts must be positive");
        }
        if (needs_shots && n > candidate_budget) {
            throw ConfigError("budget " + std::to_string(candidate_budget) + " is below shot count " +
                              std::to_string(n));
        }
        if (needs_shots && n > retrieval_depth) {
            throw ConfigError("retrieval_depth " + std::to_string(retrieval_depth) + " is below shot count " +
                              std::to_string(n));
        }
    }
    if (dataset.empty() || !std::filesystem::is_directory(dataset)) {
        throw ConfigError("dataset directory not found: '" + dataset.string() + "'");
    }
    if (needs_scorer && scorer == "synthetic" && synthetic.features == "embeddings") {
        needs_embeddings = true;
    }
    if (needs_embeddings && (embeddings.empty() || !std::filesystem::is_regular_file(embeddings))) {
        throw ConfigError("embedding file not found: '" + embeddings.string() + "'");
    }
    if (needs_scorer && scorer == "http" && endpoint.url.empty()) {
        throw ConfigError("scorer = http needs scorer_url (or AMBIG_SCORER_URL)");
    }
    if (needs_scorer && scorer == "synthetic") {
        for (const auto* path : {&synthetic.weights, &synthetic.features}) {
            if (*path != "centroid" && *path != "embeddings" && *path != "hash" &&
                !std::filesystem::is_regular_file(*path)) {
                throw ConfigError("synthetic scorer file not found: '" + *path + "'");
            }
        }
    }
    if (workers == 0) {
        throw ConfigError("workers must be at least 1");
    }
}

std::string ExperimentConfig::to_text() const {
    std::vector<std::string> names;
    for (auto s : strategies) {
        names.emplace_back(strategy_name(s));
    }
    std::ostringstream out;
    out << "dataset = " << std::filesystem::absolute(dataset).string() << '\n';
    if (!embeddings.empty()) {
        out << "embeddings = " << std::filesystem::absolute(embeddings).string() << '\n';
    }
    out << "scorer = " << scorer << '\n';
    if (!endpoint.url.empty()) {
        out << "scorer_url = " << endpoint.url << '\n';
    }
    out << "scorer_timeout_ms = " << endpoint.timeout_ms << '\n';
    out << "scorer_retries = " << endpoint.retries << '\n';
    const auto abs_or_keyword = [](const std::string& v) {
        return v == "centroid" || v == "embeddings" || v == "hash" ? v : std::filesystem::absolute(v).string();
    };
    out << "synthetic_weights = " << abs_or_keyword(synthetic.weights) << '\n';
    out << "synthetic_features = " << abs_or_keyword(synthetic.features) << '\n';
    out << "synthetic_hash_dim = " << synthetic.hash_dim << '\n';
    out << "synthetic_alpha = " << format_double(synthetic.alpha) << '\n';
    out << "synthetic_sigma = " << format_double(synthetic.sigma) << '\n';
    out << "synthetic_seed = " << synthetic.seed << '\n';
    out << "strategies = " << join(names) << '\n';
    out << "shots = " << join(shots) << '\n';
    out << "seeds = " << join(seeds) << '\n';
    out << "budget = " << candidate_budget << '\n';
    out << "retrieval_depth = " << retrieval_depth << '\n';
    out << "fallback = " << (fallback_enabled ? "true" : "false") << '\n';
    out << "order = " << order_policy_name(order) << '\n';
    out << "out = " << std::filesystem::absolute(this->out).string() << '\n';
    if (cache) {
        out << "cache = " << std::filesystem::absolute(*cache).string() << '\n';
    }
    out << "workers = " << workers << '\n';
    out << "fail_fast = " << (fail_fast ? "true" : "false") << '\n';
    return out.str();
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    ExperimentConfig config;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (!line.empty() && line.back() == '\r') {
            line = trim(line.substr(0, line.size() - 1));
        }
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        try {
            config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), base_dir);
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file '" + file.string() + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), std::filesystem::absolute(file).parent_path());
}

void apply_environment(ExperimentConfig& config) {
    if (const char* url = std::getenv("AMBIG_SCORER_URL"); url != nullptr && *url != '\0') {
        config.endpoint.url = url;
    }
}

}  // namespace ambig
