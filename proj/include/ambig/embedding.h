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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ambig/corpus.h"

namespace ambig {

/// Fixed-dimension float vectors keyed by example id, stored row-major.
class EmbeddingStore {
public:
    explicit EmbeddingStore(std::uint32_t dim);

    /// Throws DataError on dimension mismatch, non-finite entries or a
    /// duplicate id.
    void add(std::string id, std::span<const float> values);

    std::uint32_t dim() const { return dim_; }
    std::size_t size() const { return ids_.size(); }
    const std::string& id(std::size_t row) const { return ids_[row]; }
    std::span<const float> row(std::size_t row) const {
        return {values_.data() + row * dim_, dim_};
    }
    std::optional<std::size_t> find(std::string_view id) const;
    std::span<const float> at(std::string_view id) const;

    /// New store holding only `ids`, in the given order.
    EmbeddingStore subset(std::span<const std::string> ids) const;

private:
    std::uint32_t dim_;
    std::vector<std::string> ids_;
    std::vector<float> values_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Binary layout: "EMB1", dim (u32 LE), count (u64 LE), then per record
/// id length (u32 LE), id bytes, dim x f32 LE.
EmbeddingStore read_store(const std::filesystem::path& path);
void write_store(const std::filesystem::path& path, const EmbeddingStore& store);

/// read_store() plus a check that every id resolves in `dataset`.
EmbeddingStore load_store(const std::filesystem::path& path, const Dataset& dataset);

struct Candidate {
    std::string id;
    double score;
    /// 1-based position in the full retrieval ranking.
    std::size_t rank;
};

struct RankedCandidates {
    std::string query_id;
    std::vector<Candidate> items;

    std::size_t depth() const { return items.size(); }
};

/// Inner product computed in double precision.
double inner_product(std::span<const float> a, std::span<const float> b);

/// Exhaustive inner-product search. Returns the `depth` best entries by
/// descending score; equal scores go to the lexicographically smaller id.
RankedCandidates rank_candidates(std::span<const float> query, const EmbeddingStore& store,
                                 std::size_t depth, std::string query_id = {});

/// Source of embedding vectors for raw texts.
class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual std::string id() const = 0;
    virtual std::vector<std::vector<float>> embed(std::span<const std::string> texts) = 0;
};

/// Deterministic signed feature-hashing embedder over lowercase word unigrams
/// and character trigrams, L2-normalized. No network, no model.
class HashEmbedder : public EmbeddingBackend {
public:
    explicit HashEmbedder(std::uint32_t dim);

    std::string id() const override;
    std::vector<std::vector<float>> embed(std::span<const std::string> texts) override;
    std::vector<float> embed_one(std::string_view text) const;

private:
    std::uint32_t dim_;
};

struct HttpEndpoint {
    std::string url;
    int timeout_ms = 30000;
    int retries = 3;
};

/// POSTs {"texts": [...]} and expects {"embeddings": [[...], ...]}.
class HttpEmbedder : public EmbeddingBackend {
public:
    explicit HttpEmbedder(HttpEndpoint endpoint);

    std::string id() const override;
    std::vector<std::vector<float>> embed(std::span<const std::string> texts) override;

private:
    HttpEndpoint endpoint_;
};

/// Embeds `texts` in batches of `batch_size`, checking that every vector has
/// the same dimension and only finite entries.
std::vector<std::vector<float>> embed_with_backend(std::span<const std::string> texts,
                                                   EmbeddingBackend& backend,
                                                   std::size_t batch_size = 64);

}  // namespace ambig
