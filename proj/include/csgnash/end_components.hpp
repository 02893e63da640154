#pragma once

#include <vector>

#include "csgnash/csg.hpp"

namespace csgnash {

struct EndComponent {
    std::vector<StateId> states;     // sorted
    std::vector<std::size_t> rows;   // retained joint actions (base rows), sorted
    bool non_terminal = false;       // some base row of a member state leaves the component
};

// Maximal end components of the joint-action graph, ordered by smallest state.
// With `within`, only components inside that state set are considered.
std::vector<EndComponent> enumerate_mecs(const Csg& g, const StateSet* within = nullptr);

// Strongly connected components of the graph given as adjacency lists.
// Returns the component index of every vertex.
std::vector<std::size_t> strongly_connected_components(const std::vector<std::vector<StateId>>& adj,
                                                       std::size_t& count);

}  // namespace csgnash
