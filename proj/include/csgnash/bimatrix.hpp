#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "csgnash/rational.hpp"

namespace csgnash {

// Two-player normal-form game. Row i is player 1's action a_i, column j is
// player 2's action b_j. Matrices are stored row-major.
struct BimatrixGame {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Rational> z1;
    std::vector<Rational> z2;

    BimatrixGame() = default;
    BimatrixGame(std::size_t l, std::size_t m) : rows(l), cols(m), z1(l * m), z2(l * m) {}

    Rational& payoff1(std::size_t i, std::size_t j) { return z1[i * cols + j]; }
    Rational& payoff2(std::size_t i, std::size_t j) { return z2[i * cols + j]; }
    const Rational& payoff1(std::size_t i, std::size_t j) const { return z1[i * cols + j]; }
    const Rational& payoff2(std::size_t i, std::size_t j) const { return z2[i * cols + j]; }

    static BimatrixGame from_rows(const std::vector<std::vector<Rational>>& a,
                                  const std::vector<std::vector<Rational>>& b);
};

struct MixedProfile {
    std::vector<Rational> x;
    std::vector<Rational> y;
    Rational u;
    Rational v;

    bool operator==(const MixedProfile&) const = default;
};

struct DominanceReduction {
    BimatrixGame reduced;
    std::vector<std::size_t> row_map;  // reduced row -> original row
    std::vector<std::size_t> col_map;
};

// Iterated elimination of strictly dominated pure strategies (pure dominators only).
DominanceReduction eliminate_dominated(const BimatrixGame& g);

// All extreme equilibria: pairs of vertices of the two best-response polytopes
// that are completely labelled. Sorted by lexicographic_less.
std::vector<MixedProfile> enumerate_equilibria(const BimatrixGame& g);

// The four complementarity conditions. Tolerance is relative; 0 means exact.
bool is_equilibrium(const BimatrixGame& g, const std::vector<Rational>& x, const std::vector<Rational>& y,
                    const Rational& u, const Rational& v, const Rational& tolerance = 0);

// Index of the selected social-welfare-optimal equilibrium. Payoff comparisons
// use a relative tolerance (0 means exact). Throws EmptyList.
std::size_t select_swne(std::span<const MixedProfile> equilibria, const Rational& tolerance = 0);

// Order on profiles: support of x, support of y, then the probabilities.
bool lexicographic_less(const MixedProfile& a, const MixedProfile& b);

std::vector<std::size_t> support_of(const std::vector<Rational>& dist);

struct SwneOptions {
    bool eliminate_dominated = true;
    Rational tolerance = 0;
};

struct SwneSolution {
    MixedProfile profile;               // in the indices of the original game
    std::size_t equilibrium_count = 0;  // extreme equilibria of the (reduced) game
};

SwneSolution solve_swne(const BimatrixGame& g, const SwneOptions& options = {});

}  // namespace csgnash
