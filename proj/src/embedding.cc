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

#include "ambig/embedding.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "ambig/error.h"
#include "ambig/hash.h"
#include "ambig/http.h"

namespace ambig {

namespace {

constexpr std::array<char, 4> kMagic = {'E', 'M', 'B', '1'};

template <class T>
void put_le(std::ostream& out, T value) {
    std::array<char, sizeof(T)> bytes;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
    }
    out.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& in, const std::string& what) {
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
        throw DataError("embedding file truncated while reading " + what);
    }
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value |= static_cast<T>(bytes[i]) << (8 * i);
    }
    return value;
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::uint32_t dim) : dim_(dim) {
    if (dim == 0) {
        throw DataError("embedding dimension must be positive");
    }
}

void EmbeddingStore::add(std::string id, std::span<const float> values) {
    if (values.size() != dim_) {
        throw DataError("embedding for '" + id + "' has dim " + std::to_string(values.size()) +
                        ", store dim is " + std::to_string(dim_));
    }
    for (float v : values) {
        if (!std::isfinite(v)) {
            throw DataError("embedding for '" + id + "' has a non-finite entry");
        }
    }
    if (!index_.emplace(id, ids_.size()).second) {
        throw DataError("duplicate embedding id '" + id + "'");
    }
    ids_.push_back(std::move(id));
    values_.insert(values_.end(), values.begin(), values.end());
}

std::optional<std::size_t> EmbeddingStore::find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::span<const float> EmbeddingStore::at(std::string_view id) const {
    const auto row_index = find(id);
    if (!row_index) {
        throw DataError("no embedding for id '" + std::string(id) + "'");
    }
    return row(*row_index);
}

EmbeddingStore EmbeddingStore::subset(std::span<const std::string> ids) const {
    EmbeddingStore out(dim_);
    for (const auto& id : ids) {
        out.add(id, at(id));
    }
    return out;
}

EmbeddingStore read_store(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open embedding file " + path.string());
    }
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw DataError(path.string() + " is not an EMB1 embedding file");
    }
    const auto dim = get_le<std::uint32_t>(in, "dim");
    const auto count = get_le<std::uint64_t>(in, "count");
    EmbeddingStore store(dim);
    std::string id;
    std::vector<float> values(dim);
    for (std::uint64_t r = 0; r < count; ++r) {
        const auto id_len = get_le<std::uint32_t>(in, "id length");
        id.resize(id_len);
        if (!in.read(id.data(), id_len)) {
            throw DataError("embedding file truncated in record " + std::to_string(r));
        }
        for (auto& v : values) {
            v = std::bit_cast<float>(get_le<std::uint32_t>(in, "vector"));
        }
        store.add(id, values);
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw DataError(path.string() + " has trailing bytes after " + std::to_string(count) + " records");
    }
    return store;
}

void write_store(const std::filesystem::path& path, const EmbeddingStore& store) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write embedding file " + path.string());
    }
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, store.dim());
    put_le<std::uint64_t>(out, store.size());
    for (std::size_t r = 0; r < store.size(); ++r) {
        const auto& id = store.id(r);
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
        for (float v : store.row(r)) {
            put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
        }
    }
    if (!out) {
        throw DataError("failed writing embedding file " + path.string());
    }
}

EmbeddingStore load_store(const std::filesystem::path& path, const Dataset& dataset) {
    auto store = read_store(path);
    for (std::size_t r = 0; r < store.size(); ++r) {
        if (dataset.find(store.id(r)) == nullptr) {
            throw DataError("embedding id '" + store.id(r) + "' is not in dataset '" + dataset.name() + "'");
        }
    }
    return store;
}

double inner_product(std::span<const float> a, std::span<const float> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return sum;
}

RankedCandidates rank_candidates(std::span<const float> query, const EmbeddingStore& store,
                                 std::size_t depth, std::string query_id) {
    if (query.size() != store.dim()) {
        throw std::invalid_argument("rank_candidates: query dim " + std::to_string(query.size()) +
                                    " != store dim " + std::to_string(store.dim()));
    }
    if (depth == 0) {
        throw std::invalid_argument("rank_candidates: depth must be positive");
    }
    if (depth > store.size()) {
        throw std::invalid_argument("rank_candidates: depth " + std::to_string(depth) +
                                    " exceeds store size " + std::to_string(store.size()));
    }
    std::vector<double> scores(store.size());
    for (std::size_t r = 0; r < store.size(); ++r) {
        scores[r] = inner_product(query, store.row(r));
    }
    std::vector<std::size_t> order(store.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto better = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) {
            return scores[a] > scores[b];
        }
        return store.id(a) < store.id(b);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(depth), order.end(), better);

    RankedCandidates ranked{std::move(query_id), {}};
    ranked.items.reserve(depth);
    for (std::size_t i = 0; i < depth; ++i) {
        ranked.items.push_back({store.id(order[i]), scores[order[i]], i + 1});
    }
    return ranked;
}

HashEmbedder::HashEmbedder(std::uint32_t dim) : dim_(dim) {
    if (dim == 0) {
        throw std::invalid_argument("HashEmbedder: dim must be positive");
    }
}

std::string HashEmbedder::id() const { return "hash:" + std::to_string(dim_); }

std::vector<float> HashEmbedder::embed_one(std::string_view text) const {
    std::string lower(text);
    for (auto& c : lower) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    std::vector<double> acc(dim_, 0.0);
    const auto add_feature = [&](std::string_view kind, std::string_view feature) {
        const std::uint64_t h = fnv1a64(feature, fnv1a64(kind));
        const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
        acc[h % dim_] += sign;
    };
    std::size_t start = 0;
    for (std::size_t i = 0; i <= lower.size(); ++i) {
        if (i == lower.size() || !std::isalnum(static_cast<unsigned char>(lower[i]))) {
            if (i > start) {
                add_feature("w:", std::string_view(lower).substr(start, i - start));
            }
            start = i + 1;
        }
    }
    if (lower.size() < 3) {
        add_feature("t:", lower);
    } else {
        for (std::size_t i = 0; i + 3 <= lower.size(); ++i) {
            add_feature("t:", std::string_view(lower).substr(i, 3));
        }
    }
    double norm = 0.0;
    for (double v : acc) {
        norm += v * v;
    }
    norm = std::sqrt(norm);
    std::vector<float> out(dim_, 0.0f);
    if (norm > 0.0) {
        for (std::size_t i = 0; i < dim_; ++i) {
            out[i] = static_cast<float>(acc[i] / norm);
        }
    }
    return out;
}

std::vector<std::vector<float>> HashEmbedder::embed(std::span<const std::string> texts) {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        out.push_back(embed_one(text));
    }
    return out;
}

HttpEmbedder::HttpEmbedder(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {
    split_url(endpoint_.url);
}

std::string HttpEmbedder::id() const { return "http:" + endpoint_.url; }

std::vector<std::vector<float>> HttpEmbedder::embed(std::span<const std::string> texts) {
    nlohmann::json body = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
    const auto reply = post_json(endpoint_, body);
    const auto it = reply.find("embeddings");
    if (it == reply.end() || !it->is_array() || it->size() != texts.size()) {
        throw BackendError(endpoint_.url + " returned no 'embeddings' array of length " +
                               std::to_string(texts.size()),
                           false);
    }
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    try {
        for (const auto& row : *it) {
            out.push_back(row.get<std::vector<float>>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(endpoint_.url + " returned a malformed embedding: " + e.what(), false);
    }
    return out;
}

std::vector<std::vector<float>> embed_with_backend(std::span<const std::string> texts,
                                                   EmbeddingBackend& backend, std::size_t batch_size) {
    if (batch_size == 0) {
        throw std::invalid_argument("embed_with_backend: batch size must be positive");
    }
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    std::optional<std::size_t> dim;
    for (std::size_t begin = 0; begin < texts.size(); begin += batch_size) {
        const auto batch = texts.subspan(begin, std::min(batch_size, texts.size() - begin));
        auto vectors = backend.embed(batch);
        if (vectors.size() != batch.size()) {
            throw BackendError(backend.id() + " returned " + std::to_string(vectors.size()) + " vectors for " +
                                   std::to_string(batch.size()) + " texts",
                               false);
        }
        for (auto& v : vectors) {
            if (!dim) {
                if (v.empty()) {
                    throw BackendError(backend.id() + " returned an empty vector", false);
                }
                dim = v.size();
            } else if (v.size() != *dim) {
                throw BackendError(backend.id() + " changed dimension mid-batch (" + std::to_string(*dim) +
                                       " -> " + std::to_string(v.size()) + ")",
                                   false);
            }
            if (!std::all_of(v.begin(), v.end(), [](float x) { return std::isfinite(x); })) {
                throw BackendError(backend.id() + " returned a non-finite value", false);
            }
            out.push_back(std::move(v));
        }
    }
    return out;
}

}  // namespace ambig
