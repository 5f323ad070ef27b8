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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ambig/embedding.h"
#include "ambig/error.h"
#include "doctest.h"
#include "helpers.h"
#include "oracles.h"

using namespace ambig;
using test_support::Gen;
using test_support::TempDir;

namespace {

EmbeddingStore random_store(Gen& gen, std::size_t size, std::uint32_t dim, bool with_ties) {
    EmbeddingStore store(dim);
    std::vector<float> previous;
    for (std::size_t i = 0; i < size; ++i) {
        std::vector<float> v(dim);
        if (with_ties && !previous.empty() && gen.coin(0.3)) {
            v = previous;
        } else {
            for (auto& x : v) {
                // Coarse grid values make exact score ties common.
                x = with_ties ? static_cast<float>(static_cast<int>(gen.below(5)) - 2)
                              : static_cast<float>(gen.real(-1.0, 1.0));
            }
        }
        previous = v;
        store.add("id" + std::to_string(gen.below(1000000)) + "_" + std::to_string(i), v);
    }
    return store;
}

void check_against_oracle(const EmbeddingStore& store, const std::vector<float>& query, std::size_t depth) {
    std::vector<std::vector<float>> rows;
    std::vector<std::string> ids;
    for (std::size_t r = 0; r < store.size(); ++r) {
        rows.emplace_back(store.row(r).begin(), store.row(r).end());
        ids.push_back(store.id(r));
    }
    const auto expected = oracle::knn(query, rows, ids, depth);
    const auto got = rank_candidates(query, store, depth);
    REQUIRE(got.items.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(got.items[i].id == expected[i].id);
        CHECK(got.items[i].score == expected[i].score);
        CHECK(got.items[i].rank == i + 1);
    }
}

}  // namespace

TEST_CASE("store validation") {
    EmbeddingStore store(2);
    store.add("a", std::vector<float>{1, 2});
    CHECK_THROWS_AS(store.add("b", std::vector<float>{1, 2, 3}), DataError);
    CHECK_THROWS_AS(store.add("c", std::vector<float>{std::numeric_limits<float>::quiet_NaN(), 0}), DataError);
    CHECK_THROWS_AS(store.add("d", std::vector<float>{std::numeric_limits<float>::infinity(), 0}), DataError);
    CHECK_THROWS_AS(store.add("a", std::vector<float>{0, 0}), DataError);
    CHECK(store.size() == 1);
    CHECK(store.at("a")[1] == 2.0f);
    CHECK_THROWS_AS(store.at("zz"), DataError);
}

TEST_CASE("EMB1 file with 3 vectors of dim 4") {
    TempDir tmp;
    EmbeddingStore store(4);
    for (int i = 0; i < 3; ++i) {
        store.add("e" + std::to_string(i), std::vector<float>{1.0f * i, 2, 3, 4});
    }
    write_store(tmp.path() / "s.emb", store);
    const auto back = read_store(tmp.path() / "s.emb");
    CHECK(back.size() == 3);
    CHECK(back.dim() == 4);
    // 4 magic + 4 dim + 8 count, then per record 4 length + 2 id bytes + 16 floats.
    CHECK(std::filesystem::file_size(tmp.path() / "s.emb") == 16 + 3 * (4 + 2 + 16));
}

TEST_CASE("EMB1 round trip of 10k random vectors") {
    TempDir tmp;
    Gen gen(3);
    EmbeddingStore store(8);
    for (int i = 0; i < 10000; ++i) {
        std::vector<float> v(8);
        for (auto& x : v) {
            x = static_cast<float>(gen.real(-1e6, 1e6));
        }
        store.add("v" + std::to_string(i), v);
    }
    write_store(tmp.path() / "big.emb", store);
    const auto back = read_store(tmp.path() / "big.emb");
    REQUIRE(back.size() == store.size());
    for (std::size_t r = 0; r < store.size(); ++r) {
        REQUIRE(back.id(r) == store.id(r));
        CHECK(std::equal(back.row(r).begin(), back.row(r).end(), store.row(r).begin()));
    }
}

TEST_CASE("EMB1 corruption is a data error") {
    TempDir tmp;
    EmbeddingStore store(2);
    store.add("a", std::vector<float>{1, 2});
    write_store(tmp.path() / "s.emb", store);
    auto bytes = test_support::read_text(tmp.path() / "s.emb");
    test_support::write_text(tmp.path() / "trunc.emb", bytes.substr(0, bytes.size() - 1));
    CHECK_THROWS_AS(read_store(tmp.path() / "trunc.emb"), DataError);
    test_support::write_text(tmp.path() / "extra.emb", bytes + "x");
    CHECK_THROWS_AS(read_store(tmp.path() / "extra.emb"), DataError);
    test_support::write_text(tmp.path() / "magic.emb", "EMB2" + bytes.substr(4));
    CHECK_THROWS_AS(read_store(tmp.path() / "magic.emb"), DataError);
    // A non-finite float in the payload.
    const float nan = std::numeric_limits<float>::quiet_NaN();
    bytes.replace(bytes.size() - 4, 4, reinterpret_cast<const char*>(&nan), 4);
    test_support::write_text(tmp.path() / "nan.emb", bytes);
    CHECK_THROWS_AS(read_store(tmp.path() / "nan.emb"), DataError);
}

TEST_CASE("load_store checks ids against the dataset") {
    TempDir tmp;
    const auto dataset = test_support::pool_dataset({0, 1}, 2);
    EmbeddingStore store(1);
    store.add("t0", std::vector<float>{1});
    store.add("stranger", std::vector<float>{1});
    write_store(tmp.path() / "s.emb", store);
    CHECK_THROWS_AS(load_store(tmp.path() / "s.emb", dataset), DataError);
}

TEST_CASE("rank_candidates hand example") {
    EmbeddingStore store(2);
    store.add("e1", std::vector<float>{1, 0});
    store.add("e2", std::vector<float>{0, 1});
    store.add("e3", std::vector<float>{0.5f, 0.5f});
    const std::vector<float> q{1, 0};
    const auto r3 = rank_candidates(q, store, 3, "q");
    REQUIRE(r3.depth() == 3);
    CHECK(r3.items[0].id == "e1");
    CHECK(r3.items[0].score == 1.0);
    CHECK(r3.items[1].id == "e3");
    CHECK(r3.items[1].score == 0.5);
    CHECK(r3.items[2].id == "e2");
    CHECK(r3.items[2].score == 0.0);
    const auto r2 = rank_candidates(q, store, 2);
    REQUIRE(r2.depth() == 2);
    CHECK(r2.items[1].id == "e3");

    CHECK_THROWS_AS(rank_candidates(std::vector<float>{1, 0, 0}, store, 2), std::invalid_argument);
    CHECK_THROWS_AS(rank_candidates(q, store, 0), std::invalid_argument);
    CHECK_THROWS_AS(rank_candidates(q, store, 4), std::invalid_argument);
}

TEST_CASE("rank_candidates ties break by id") {
    EmbeddingStore store(1);
    store.add("b", std::vector<float>{1});
    store.add("c", std::vector<float>{1});
    store.add("a", std::vector<float>{1});
    const auto r = rank_candidates(std::vector<float>{2}, store, 3);
    CHECK(r.items[0].id == "a");
    CHECK(r.items[1].id == "b");
    CHECK(r.items[2].id == "c");
}

TEST_CASE("rank_candidates matches the exhaustive oracle") {
    Gen gen(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto dim = static_cast<std::uint32_t>(gen.between(2, 16));
        const auto store = random_store(gen, gen.between(1, 500), dim, trial % 2 == 0);
        std::vector<float> q(dim);
        for (auto& x : q) {
            x = trial % 2 == 0 ? static_cast<float>(gen.below(3)) : static_cast<float>(gen.real(-1, 1));
        }
        check_against_oracle(store, q, gen.between(1, store.size()));
    }
}

TEST_CASE("depth d is a prefix of depth d+1, and insertion order does not matter") {
    Gen gen(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto store = random_store(gen, gen.between(2, 200), 4, true);
        std::vector<float> q{1, -1, 2, 0};
        const auto d = gen.between(1, store.size() - 1);
        const auto a = rank_candidates(q, store, d);
        const auto b = rank_candidates(q, store, d + 1);
        for (std::size_t i = 0; i < d; ++i) {
            CHECK(a.items[i].id == b.items[i].id);
        }
        std::vector<std::size_t> order(store.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), gen.engine);
        EmbeddingStore shuffled(store.dim());
        for (auto r : order) {
            shuffled.add(store.id(r), store.row(r));
        }
        const auto c = rank_candidates(q, shuffled, d);
        for (std::size_t i = 0; i < d; ++i) {
            CHECK(a.items[i].id == c.items[i].id);
        }
    }
}

TEST_CASE("hash embedder") {
    HashEmbedder embedder(32);
    const std::vector<std::string> none;
    CHECK(embed_with_backend(none, embedder).empty());
    const auto a = embedder.embed_one("abc");
    CHECK(a == embedder.embed_one("abc"));
    CHECK(a.size() == 32);
    double norm = 0;
    for (float x : a) {
        norm += x * x;
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));

    std::vector<std::string> texts;
    for (int i = 0; i < 100; ++i) {
        texts.push_back("text number " + std::to_string(i * 7));
    }
    const auto batched = embed_with_backend(texts, embedder, 100);
    const auto singles = embed_with_backend(texts, embedder, 1);
    CHECK(batched == singles);
}

namespace {

class DriftingEmbedder : public EmbeddingBackend {
public:
    std::string id() const override { return "drift"; }
    std::vector<std::vector<float>> embed(std::span<const std::string> texts) override {
        std::vector<std::vector<float>> out;
        for (std::size_t i = 0; i < texts.size(); ++i) {
            out.push_back(std::vector<float>(++calls_ > 1 ? 3 : 2, 1.0f));
        }
        return out;
    }

private:
    int calls_ = 0;
};

}  // namespace

TEST_CASE("dimension drift mid-batch is a backend error") {
    DriftingEmbedder embedder;
    const std::vector<std::string> texts{"a", "b"};
    CHECK_THROWS_AS(embed_with_backend(texts, embedder), BackendError);
}
