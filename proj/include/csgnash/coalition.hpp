#pragma once

#include <string>
#include <vector>

#include "csgnash/csg.hpp"

namespace csgnash {

// Two-player view of a Csg: player 1 controls the coalition (members in
// ascending index order), player 2 the remaining players. Local action tuples
// are indexed i in [0, rows(s)) and j in [0, cols(s)).
class CoalitionGame {
public:
    CoalitionGame(const Csg& base, std::vector<PlayerId> coalition);

    const Csg& base() const { return *base_; }
    const std::vector<PlayerId>& members(int side) const { return side == 0 ? first_ : second_; }
    std::size_t num_states() const { return base_->num_states(); }

    std::size_t rows(StateId s) const { return dims_[2 * s]; }
    std::size_t cols(StateId s) const { return dims_[2 * s + 1]; }
    // Base-game row of the joint action (i, j) at s.
    std::size_t row(StateId s, std::size_t i, std::size_t j) const { return table_[offset_[s] + i * cols(s) + j]; }

    // Action tuple of coalition `side` (0 or 1) at local index k.
    std::vector<ActionId> tuple(StateId s, int side, std::size_t k) const;
    std::string tuple_text(StateId s, int side, std::size_t k) const;

    // Formal alphabet: product over members of (A_i plus idle).
    std::vector<std::vector<ActionId>> alphabet(int side) const;

private:
    const Csg* base_;
    std::vector<PlayerId> first_, second_;
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> offset_;
    std::vector<std::size_t> table_;
};

}  // namespace csgnash
