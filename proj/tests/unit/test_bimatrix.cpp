#include <random>

#include "doctest.h"

#include "csgnash/bimatrix.hpp"
#include "csgnash/error.hpp"
#include "oracles/oracles.hpp"

using namespace csgnash;

namespace {

BimatrixGame stag_hunt() {
    return BimatrixGame::from_rows({{2, 2, 2}, {0, 4, 6}}, {{4, 2, 0}, {4, 6, 9}});
}

BimatrixGame random_game(std::mt19937& rng, std::size_t max_dim) {
    std::uniform_int_distribution<std::size_t> dim(1, max_dim);
    std::uniform_int_distribution<int> pay(-5, 5);
    BimatrixGame g(dim(rng), dim(rng));
    for (auto& z : g.z1) z = pay(rng);
    for (auto& z : g.z2) z = pay(rng);
    return g;
}

}  // namespace

TEST_SUITE("bimatrix") {

TEST_CASE("stag hunt has two pure and one mixed equilibrium") {
    auto eqs = enumerate_equilibria(stag_hunt());
    REQUIRE(eqs.size() == 3);
    int pure24 = 0, mixed = 0, top = 0;
    for (const auto& e : eqs) {
        if (e.u == 2 && e.v == 4) {
            if (e.x == std::vector<Rational>{Rational(5, 9), Rational(4, 9)}) {
                CHECK(e.y == std::vector<Rational>{Rational(2, 3), 0, Rational(1, 3)});
                ++mixed;
            } else {
                CHECK(e.x == std::vector<Rational>{1, 0});
                CHECK(e.y == std::vector<Rational>{1, 0, 0});
                ++pure24;
            }
        }
        if (e.u == 6 && e.v == 9) {
            CHECK(e.x == std::vector<Rational>{0, 1});
            CHECK(e.y == std::vector<Rational>{0, 0, 1});
            ++top;
        }
    }
    CHECK(pure24 == 1);
    CHECK(mixed == 1);
    CHECK(top == 1);

    auto sol = solve_swne(stag_hunt());
    CHECK(sol.profile.u == 6);
    CHECK(sol.profile.v == 9);
    CHECK(sol.profile.u + sol.profile.v == 15);
}

TEST_CASE("complementarity certificate") {
    auto g = stag_hunt();
    CHECK(is_equilibrium(g, {1, 0}, {1, 0, 0}, 2, 4));
    CHECK(is_equilibrium(g, {0, 1}, {0, 0, 1}, 6, 9));
    CHECK_FALSE(is_equilibrium(g, {0, 1}, {1, 0, 0}, 0, 0));
    CHECK_FALSE(is_equilibrium(g, {1, 0}, {1, 0, 0}, 2, 3));
}

TEST_CASE("selection prefers equal payoffs among maximal sums") {
    std::vector<MixedProfile> eqs{
        {{1, 0}, {1, 0}, 3, 1},
        {{0, 1}, {0, 1}, 2, 2},
        {{0, 1}, {1, 0}, 1, 1},
    };
    CHECK(select_swne(eqs) == 1);
}

TEST_CASE("selection falls back to the first player's maximum") {
    std::vector<MixedProfile> eqs{
        {{1, 0}, {1, 0}, 1, 3},
        {{0, 1}, {0, 1}, 3, 1},
    };
    CHECK(select_swne(eqs) == 1);
}

TEST_CASE("selection tie-break is lexicographic") {
    std::vector<MixedProfile> eqs{
        {{0, 1}, {0, 1}, 1, 1},
        {{1, 0}, {0, 1}, 1, 1},
    };
    CHECK(select_swne(eqs) == 1);
}

TEST_CASE("empty list is rejected") {
    std::vector<MixedProfile> none;
    CHECK_THROWS_AS(select_swne(none), Error);
}

TEST_CASE("dominance elimination") {
    // Row 1 is strictly dominated by row 0; then column 1 by column 0.
    auto g = BimatrixGame::from_rows({{3, 2}, {1, 0}}, {{2, 1}, {5, 0}});
    auto red = eliminate_dominated(g);
    CHECK(red.row_map == std::vector<std::size_t>{0});
    CHECK(red.col_map == std::vector<std::size_t>{0});
    auto sol = solve_swne(g);
    CHECK(sol.profile.x == std::vector<Rational>{1, 0});
    CHECK(sol.profile.y == std::vector<Rational>{1, 0});
}

TEST_CASE("matching pennies has a unique mixed equilibrium") {
    auto g = BimatrixGame::from_rows({{1, 0}, {0, 1}}, {{0, 1}, {1, 0}});
    auto eqs = enumerate_equilibria(g);
    REQUIRE(eqs.size() == 1);
    CHECK(eqs[0].x == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
    CHECK(eqs[0].y == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
    CHECK(eqs[0].u == Rational(1, 2));
    CHECK(eqs[0].v == Rational(1, 2));
}

TEST_CASE("one-by-one game") {
    auto eqs = enumerate_equilibria(BimatrixGame::from_rows({{3}}, {{7}}));
    REQUIRE(eqs.size() == 1);
    CHECK(eqs[0].u == 3);
    CHECK(eqs[0].v == 7);
}

TEST_CASE("constant-sum games have a unique equilibrium value") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        auto g = random_game(rng, 4);
        for (std::size_t k = 0; k < g.z1.size(); ++k) g.z2[k] = 3 - g.z1[k];
        auto eqs = enumerate_equilibria(g);
        REQUIRE_FALSE(eqs.empty());
        for (const auto& e : eqs) {
            CHECK(e.u == eqs[0].u);
            CHECK(e.u + e.v == 3);
        }
    }
}

TEST_CASE("random games agree with support enumeration") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        auto g = random_game(rng, 4);
        CAPTURE(trial);
        auto got = enumerate_equilibria(g);
        auto want = oracle::nfg_equilibria(g);
        CHECK(oracle::profile_keys(got) == oracle::profile_keys(want));
        for (const auto& e : got) CHECK(is_equilibrium(g, e.x, e.y, e.u, e.v, 0));
        auto sol = solve_swne(g);
        auto vals = oracle::swne_values(want);
        CHECK(sol.profile.u == vals[0]);
        CHECK(sol.profile.v == vals[1]);
        CHECK(is_equilibrium(g, sol.profile.x, sol.profile.y, sol.profile.u, sol.profile.v, 0));
    }
}

TEST_CASE("dominance elimination preserves equilibria") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        auto g = random_game(rng, 4);
        auto red = eliminate_dominated(g);
        std::vector<MixedProfile> lifted;
        for (const auto& e : enumerate_equilibria(red.reduced)) {
            MixedProfile full{std::vector<Rational>(g.rows), std::vector<Rational>(g.cols), e.u, e.v};
            for (std::size_t i = 0; i < red.row_map.size(); ++i) full.x[red.row_map[i]] = e.x[i];
            for (std::size_t j = 0; j < red.col_map.size(); ++j) full.y[red.col_map[j]] = e.y[j];
            lifted.push_back(full);
        }
        CHECK(oracle::profile_keys(lifted) == oracle::profile_keys(enumerate_equilibria(g)));
    }
}

TEST_CASE("equilibria are sorted and distinct") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        auto eqs = enumerate_equilibria(random_game(rng, 3));
        for (std::size_t k = 1; k < eqs.size(); ++k) CHECK(lexicographic_less(eqs[k - 1], eqs[k]));
    }
}

TEST_CASE("support of a distribution") {
    CHECK(support_of({0, Rational(1, 2), 0, Rational(1, 2)}) == std::vector<std::size_t>{1, 3});
}

}
