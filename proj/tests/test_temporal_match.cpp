#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "skelevo/errors.hpp"
#include "skelevo/temporal_match.hpp"

using namespace skelevo;
using PC = PixelClass;

namespace {

std::vector<PC> to_lib(const std::vector<oracle::Cls>& v) {
    std::vector<PC> out;
    for (auto c : v) out.push_back(static_cast<PC>(static_cast<int>(c)));
    return out;
}

void check_against_oracle(const PixelSet& prev, const PixelSet& next) {
    const auto m = match(prev, next);
    const auto a = testing::to_vector(prev);
    const auto b = testing::to_vector(next);
    if (!a.empty() && !b.empty()) {
        REQUIRE(m.forward == oracle::nearest(a, b));
        REQUIRE(m.backward == oracle::nearest(b, a));
    }
    CHECK(m.classification == to_lib(oracle::classify(a, b)));
}

}  // namespace

TEST_SUITE("temporal_match") {

TEST_CASE("new far pixel is growth") {
    const auto prev = testing::make_set({{0, 0}});
    const auto next = testing::make_set({{0, 0}, {5, 0}});
    const auto m = match(prev, next);
    CHECK(m.forward == std::vector<int>{0});
    CHECK(m.backward == std::vector<int>{0, 0});
    CHECK(m.classification == std::vector<PC>{PC::growth, PC::growth});
    CHECK(m.forward_in == std::vector<int>{1, 0});
}

TEST_CASE("shared partner with a foreign incoming match is irregular") {
    const auto prev = testing::make_set({{0, 0}, {4, 0}});
    const auto next = testing::make_set({{1, 0}, {2, 0}});
    const auto m = match(prev, next);
    CHECK(m.forward == std::vector<int>{0, 1});
    CHECK(m.backward == std::vector<int>{0, 0});
    CHECK(m.classification == std::vector<PC>{PC::growth, PC::irregular});
}

TEST_CASE("three new pixels sharing one old partner") {
    const auto prev = testing::make_set({{0, 0}});
    const auto next = testing::make_set({{1, 0}, {2, 0}, {3, 0}});
    const auto m = match(prev, next);
    CHECK(m.backward == std::vector<int>{0, 0, 0});
    CHECK(m.classification == std::vector<PC>{PC::growth, PC::growth, PC::growth});
}

TEST_CASE("retracting line leaves a decay pixel") {
    const auto m = match(testing::make_set({{0, 0}, {1, 0}, {2, 0}}), testing::make_set({{1, 0}}));
    CHECK(m.forward == std::vector<int>{0, 0, 0});
    CHECK(m.classification == std::vector<PC>{PC::decay});
}

TEST_CASE("identical frames are entirely known") {
    std::mt19937_64 rng(3);
    const auto s = testing::random_set(rng, 40, 40, 120);
    const auto m = match(s, s);
    for (auto c : m.classification) CHECK(c == PC::known);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(m.forward[i] == static_cast<int>(i));
}

TEST_CASE("line shifted by one pixel") {
    std::vector<Pixel> a, b;
    for (int x = 2; x <= 21; ++x) a.push_back({x, 5});
    for (int x = 3; x <= 22; ++x) b.push_back({x, 5});
    const auto m = match(testing::make_set(a), testing::make_set(b));
    CHECK(m.forward.front() == 0);
    CHECK(m.backward.back() == 19);
    REQUIRE(m.classification.size() == 20);
    CHECK(m.classification[0] == PC::growth);
    for (std::size_t i = 1; i <= 17; ++i) CHECK(m.classification[i] == PC::known);
    CHECK(m.classification[18] == PC::growth);
    CHECK(m.classification[19] == PC::growth);
}

TEST_CASE("extension of a line plus a detached new pixel") {
    const auto prev = testing::make_set({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    const auto next = testing::make_set({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {9, 0}});
    const auto m = match(prev, next);
    // The old tip is shared by two backward matches, so it is no longer known.
    CHECK(m.classification == std::vector<PC>{PC::known, PC::known, PC::known, PC::growth, PC::growth, PC::growth});
    check_against_oracle(prev, next);
}

TEST_CASE("empty frames give degenerate match sets") {
    const auto empty = testing::make_set({});
    const auto some = testing::make_set({{1, 1}, {2, 2}});
    const auto a = match(empty, some);
    CHECK(a.degenerate());
    CHECK(a.forward.empty());
    CHECK(a.backward.empty());
    CHECK(a.classification == std::vector<PC>{PC::growth, PC::growth});
    const auto b = match(some, empty);
    CHECK(b.degenerate());
    CHECK(b.classification.empty());
    CHECK(match(empty, empty).classification.empty());
}

TEST_CASE("grid index agrees with brute force, ties included") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const int w = 10 + static_cast<int>(rng() % 200);
        const int h = 10 + static_cast<int>(rng() % 200);
        const auto targets = testing::random_set(rng, w, h, 1 + static_cast<int>(rng() % 400));
        const GridIndex index(targets, 1 + static_cast<int>(rng() % 12));
        const auto pts = testing::to_vector(targets);
        for (int q = 0; q < 200; ++q) {
            // Queries reach beyond the targets' bounding box on purpose.
            const Pixel p{static_cast<int>(rng() % static_cast<unsigned>(w + 40)) - 20,
                          static_cast<int>(rng() % static_cast<unsigned>(h + 40)) - 20};
            REQUIRE(index.nearest(p) == oracle::nearest({p}, pts)[0]);
        }
    }
}

TEST_CASE("lattice targets make every query a tie") {
    std::vector<Pixel> lattice;
    for (int y = 0; y < 60; y += 4) {
        for (int x = 0; x < 60; x += 4) lattice.push_back({x, y});
    }
    const auto targets = testing::make_set(lattice, 64, 64);
    const GridIndex index(targets);
    for (int y = -5; y < 70; ++y) {
        for (int x = -5; x < 70; ++x) REQUIRE(index.nearest({x, y}) == oracle::nearest({{x, y}}, lattice)[0]);
    }
    CHECK(GridIndex(testing::make_set({})).nearest({1, 1}) == -1);
}

TEST_CASE("random pairs agree with the set-based oracle") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = 16 + static_cast<int>(rng() % 100);
        const auto prev = testing::random_set(rng, w, w, static_cast<int>(rng() % 150));
        const auto next = testing::random_set(rng, w, w, static_cast<int>(rng() % 150));
        check_against_oracle(prev, next);
    }
}

TEST_CASE("skeleton-like pairs agree with the oracle") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 40; ++trial) {
        const auto grid = testing::random_grid(rng, 48, 48);
        auto grown = grid;
        for (int i = 0; i < 30; ++i) grown[rng() % 48][rng() % 48] = 1;
        check_against_oracle(thin(testing::to_mask(grid)), thin(testing::to_mask(grown)));
    }
}

TEST_CASE("match_all pairs consecutive frames and is thread-count independent") {
    std::mt19937_64 rng(8);
    std::vector<PixelSet> seq;
    for (int i = 0; i < 9; ++i) seq.push_back(testing::random_set(rng, 50, 50, 80, i));
    const auto one = match_all(seq, 1);
    const auto many = match_all(seq, 4);
    REQUIRE(one.size() == 8);
    CHECK(one == many);
    CHECK(one[3].from_index == 3);
    CHECK(one[3].to_index == 4);
    CHECK_THROWS_AS(match_all(std::span<const PixelSet>(seq.data(), 1), 1), InputError);
}

TEST_CASE("three identical frames stay known") {
    const auto s = testing::from_art({"#####", ".....", "..###"});
    std::vector<PixelSet> seq{s, s, s};
    for (const auto& m : match_all(seq)) {
        for (auto c : m.classification) CHECK(c == PC::known);
    }
}

TEST_CASE("CSV exports") {
    const auto prev = testing::make_set({{0, 0}});
    const auto next = testing::make_set({{0, 0}, {5, 0}});
    const auto m = match(prev, next);
    CHECK(matches_csv(prev, next, m) ==
          "direction,from_x,from_y,to_x,to_y\nforward,0,0,0,0\nbackward,0,0,0,0\nbackward,5,0,0,0\n");
    CHECK(classification_csv(next, m) == "x,y,class\n0,0,growth\n5,0,growth\n");
}

}  // TEST_SUITE
