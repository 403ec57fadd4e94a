#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "lexrag/error.hpp"
#include "lexrag/vector_store.hpp"

using namespace lexrag;

TEST_CASE("cosine similarity hand values") {
    CHECK(cosine_similarity({1, 0}, {1, 0}) == doctest::Approx(1.0));
    CHECK(cosine_similarity({1, 0}, {0, 1}) == doctest::Approx(0.0));
    CHECK(cosine_similarity({1, 0}, {-1, 0}) == doctest::Approx(-1.0));
    CHECK(cosine_similarity({1, 1}, {1, 0}) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("cosine similarity stays within [-1, 1] despite rounding") {
    const std::vector<double> v = {0.1, 0.2, 0.3, 0.4};
    CHECK(cosine_similarity(v, v) <= 1.0);
    CHECK(cosine_similarity(v, v) == doctest::Approx(1.0));
}

TEST_CASE("cosine similarity rejects bad input") {
    CHECK_THROWS_AS(cosine_similarity({1, 0}, {1, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(cosine_similarity({0, 0}, {1, 0}), std::invalid_argument);
}

TEST_CASE("knn returns exact neighbours in similarity order") {
    VectorStore store(2, "mock-embed");
    store.add("east", {1, 0});
    store.add("north", {0, 1});
    store.add("north-east", {1, 1});
    store.add("west", {-1, 0});

    const auto top = store.knn_query({1, 0.1}, 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0].chunk_id == "east");
    CHECK(top[1].chunk_id == "north-east");
    CHECK(top[2].chunk_id == "north");
    CHECK(top[0].similarity > top[1].similarity);
    CHECK(top[1].similarity > top[2].similarity);
}

TEST_CASE("knn breaks exact ties by ascending chunk id") {
    VectorStore store(2, "mock-embed");
    store.add("b", {2, 0});
    store.add("a", {4, 0}); // same direction, same cosine
    store.add("c", {0, 1});
    const auto top = store.knn_query({1, 0}, 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0].chunk_id == "a");
    CHECK(top[1].chunk_id == "b");
    CHECK(top[0].similarity == doctest::Approx(top[1].similarity).epsilon(1e-15));
    CHECK(top[2].chunk_id == "c");
}

TEST_CASE("knn returns min(k, size) results") {
    VectorStore store(2, "mock-embed");
    store.add("only", {1, 1});
    CHECK(store.knn_query({1, 0}, 4).size() == 1);
    CHECK(store.knn_query({1, 0}, 1).size() == 1);
}

TEST_CASE("store validates additions and queries") {
    VectorStore store(3, "mock-embed");
    store.add("x", {1, 0, 0});
    CHECK_THROWS_AS(store.add("x", {0, 1, 0}), DataError);      // duplicate id
    CHECK_THROWS_AS(store.add("y", {1, 0}), DataError);          // dimension
    CHECK_THROWS_AS(store.add("z", {0, 0, 0}), DataError);       // zero vector
    CHECK_THROWS_AS(store.knn_query({1, 0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(store.knn_query({0, 0, 0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(store.knn_query({1, 0, 0}, 0), std::invalid_argument);
}

TEST_CASE("vector store round-trips through save and load") {
    const auto dir = std::filesystem::current_path() / "test-tmp-vs";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto path = (dir / "store.jsonl").string();

    VectorStore store(4, "ada-mock");
    store.add("c1", {0.5, 0.5, 0.5, 0.5});
    store.add("c2", {1, 0, 0, 0});
    store.add("c3", {0, -1, 0, 0});
    store.save(path);

    const auto loaded = VectorStore::load(path);
    CHECK(loaded.size() == 3);
    CHECK(loaded.dimension() == 4);
    CHECK(loaded.provider_name() == "ada-mock");

    const std::vector<double> q = {0.9, 0.1, 0, 0};
    const auto before = store.knn_query(q, 3);
    const auto after = loaded.knn_query(q, 3);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(before[i].chunk_id == after[i].chunk_id);
        CHECK(before[i].similarity == doctest::Approx(after[i].similarity).epsilon(1e-15));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("load rejects files that lie about their contents") {
    const auto dir = std::filesystem::current_path() / "test-tmp-vs-bad";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    SUBCASE("wrong format header") {
        const auto path = (dir / "bad.jsonl").string();
        std::ofstream out(path);
        out << "{\"format\":\"other\",\"version\":1,\"dimension\":2,\"provider\":\"p\",\"count\":0}\n";
        out.close();
        CHECK_THROWS_AS(VectorStore::load(path), DataError);
    }
    SUBCASE("count mismatch") {
        const auto path = (dir / "short.jsonl").string();
        std::ofstream out(path);
        out << "{\"format\":\"lexrag-vectors\",\"version\":1,\"dimension\":2,\"provider\":\"p\",\"count\":2}\n";
        out << "{\"chunk_id\":\"a\",\"vector\":[1.0,0.0]}\n";
        out.close();
        CHECK_THROWS_AS(VectorStore::load(path), DataError);
    }
    std::filesystem::remove_all(dir);
}
