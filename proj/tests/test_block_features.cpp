#include "doctest.h"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "topotext/block_features.hpp"

using namespace topotext;

namespace {

std::vector<std::string> numbered_tokens(std::size_t count, const std::string& prefix) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

} // namespace

TEST_CASE("balanced split") {
    SUBCASE("exact division") {
        const auto tokens = numbered_tokens(100, "w");
        const auto blocks = split_blocks(tokens, 10);
        REQUIRE(blocks.size() == 10);
        for (const auto& b : blocks) CHECK(b.size() == 10);
    }
    SUBCASE("remainder goes to the front blocks") {
        const auto tokens = numbered_tokens(103, "w");
        const auto blocks = split_blocks(tokens, 10);
        REQUIRE(blocks.size() == 10);
        const std::vector<std::size_t> expect{11, 11, 11, 10, 10, 10, 10, 10, 10, 10};
        for (std::size_t i = 0; i < 10; ++i) CHECK(blocks[i].size() == expect[i]);
    }
    SUBCASE("concatenation reproduces the input") {
        const auto tokens = numbered_tokens(23, "w");
        const auto blocks = split_blocks(tokens, 4);
        std::vector<std::string> joined;
        for (const auto& b : blocks) joined.insert(joined.end(), b.begin(), b.end());
        CHECK(joined == tokens);
    }
    SUBCASE("too few tokens") {
        const auto tokens = numbered_tokens(9, "w");
        CHECK_THROWS_AS(split_blocks(tokens, 10), validation_error);
    }
}

TEST_CASE("block tf-idf weights") {
    SUBCASE("term in every block has idf 1") {
        std::vector<std::string> tokens;
        for (int b = 0; b < 10; ++b) {
            tokens.push_back("common");
            tokens.push_back("filler" + std::to_string(b));
        }
        const auto blocks = split_blocks(tokens, 10);
        const auto vectors = block_tfidf(blocks);
        for (const auto& v : vectors) CHECK(v.at("common") == doctest::Approx(1.0));
    }
    SUBCASE("term three times in exactly one block") {
        std::vector<std::string> tokens = numbered_tokens(40, "w");
        tokens[0] = tokens[1] = tokens[2] = "rare"; // block 0 of 10 holds all three
        const auto blocks = split_blocks(tokens, 10);
        const auto vectors = block_tfidf(blocks);
        const double expect = 3.0 * (std::log(11.0 / 2.0) + 1.0);
        CHECK(vectors[0].at("rare") == doctest::Approx(expect).epsilon(1e-12));
        for (std::size_t b = 1; b < 10; ++b) CHECK(vectors[b].count("rare") == 0);
    }
    SUBCASE("disjoint blocks have cosine similarity zero") {
        std::vector<std::string> tokens;
        for (int b = 0; b < 4; ++b)
            for (int i = 0; i < 3; ++i)
                tokens.push_back("b" + std::to_string(b) + "_" + std::to_string(i));
        const auto blocks = split_blocks(tokens, 4);
        const auto vectors = block_tfidf(blocks);
        const auto dist = block_distance_matrix(vectors);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j) CHECK(dist(i, j) == 1.0);
    }
}

TEST_CASE("identical blocks produce fourteen zeros") {
    std::vector<std::string> tokens;
    for (int b = 0; b < 10; ++b) {
        tokens.push_back("alpha");
        tokens.push_back("beta");
    }
    const auto f = tfidf_topo_features(tokens, 10);
    REQUIRE(f.x.size() == 9);
    for (double v : f.x) CHECK(v == 0.0);
    for (double v : f.y) CHECK(v == 0.0);
    CHECK(f.flatten().size() == 14);
}

TEST_CASE("pairwise disjoint blocks: all-ones metric, loop stats from the oracle") {
    std::vector<std::string> tokens;
    for (int b = 0; b < 10; ++b)
        for (int i = 0; i < 2; ++i)
            tokens.push_back("b" + std::to_string(b) + "_" + std::to_string(i));
    const auto f = tfidf_topo_features(tokens, 10);
    REQUIRE(f.x.size() == 9);
    for (double v : f.x) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    DistanceMatrix all_ones(10);
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = i + 1; j < 10; ++j) all_ones.set(i, j, 1.0);
    const auto ref = oracle::reduction_persistence(all_ones);

    CHECK(f.y[0] == doctest::Approx(double(ref.dim1.size())));
    if (ref.dim1.empty()) {
        for (std::size_t i = 1; i < 5; ++i) CHECK(f.y[i] == 0.0);
    }
}

TEST_CASE("feature length follows the block count") {
    const auto tokens = numbered_tokens(60, "w");
    CHECK(tfidf_topo_features(tokens, 10).flatten().size() == 14);
    CHECK(tfidf_topo_features(tokens, 6).flatten().size() == 10);
}

TEST_CASE("x entries are sorted and within the cosine range") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> word(0, 15);
    std::vector<std::string> tokens;
    for (int i = 0; i < 120; ++i) tokens.push_back("w" + std::to_string(word(rng)));
    const auto f = tfidf_topo_features(tokens, 10);
    REQUIRE(f.x.size() == 9);
    for (std::size_t i = 0; i < f.x.size(); ++i) {
        CHECK(f.x[i] >= 0.0);
        CHECK(f.x[i] <= 1.0);
        if (i) CHECK(f.x[i] >= f.x[i - 1]);
    }
}

TEST_CASE("duplicating every token within blocks changes nothing") {
    std::mt19937_64 rng(79);
    std::uniform_int_distribution<int> word(0, 9);
    std::vector<std::string> tokens;
    for (int i = 0; i < 50; ++i) tokens.push_back("w" + std::to_string(word(rng)));

    std::vector<std::string> doubled;
    for (const auto& t : tokens) {
        doubled.push_back(t);
        doubled.push_back(t);
    }
    // 50 = 5 * 10 and 100 = 10 * 10, so block i of the doubled document holds
    // exactly the doubled content of block i of the original.
    const auto base = tfidf_topo_features(tokens, 10).flatten();
    const auto twice = tfidf_topo_features(doubled, 10).flatten();
    REQUIRE(base.size() == twice.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(base[i] == doctest::Approx(twice[i]).epsilon(1e-12));
}

TEST_CASE("no loops forces the four loop statistics to zero") {
    std::mt19937_64 rng(83);
    std::uniform_int_distribution<int> word(0, 30);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::string> tokens;
        for (int i = 0; i < 40; ++i) tokens.push_back("w" + std::to_string(word(rng)));
        const auto f = tfidf_topo_features(tokens, 10);
        if (f.y[0] == 0.0) {
            CHECK(f.y[1] == 0.0);
            CHECK(f.y[2] == 0.0);
            CHECK(f.y[3] == 0.0);
            CHECK(f.y[4] == 0.0);
        }
    }
}

TEST_CASE("vocabulary relabeling leaves the features unchanged") {
    std::mt19937_64 rng(89);
    std::uniform_int_distribution<int> word(0, 12);
    std::vector<std::string> tokens;
    for (int i = 0; i < 70; ++i) tokens.push_back("w" + std::to_string(word(rng)));

    std::vector<std::string> renamed;
    for (const auto& t : tokens) renamed.push_back("zz_" + t + "_renamed");

    const auto base = tfidf_topo_features(tokens, 10).flatten();
    const auto alias = tfidf_topo_features(renamed, 10).flatten();
    REQUIRE(base.size() == alias.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(base[i] == doctest::Approx(alias[i]).epsilon(1e-12));
}
