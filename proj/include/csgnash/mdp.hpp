#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "csgnash/coalition.hpp"
#include "csgnash/csg.hpp"
#include "csgnash/rational.hpp"

namespace csgnash {

// Sparse MDP. Choices of state s are [choice_begin[s], choice_begin[s+1]);
// transitions of choice c are [trans_begin[c], trans_begin[c+1]).
struct Mdp {
    std::size_t num_states = 0;
    std::vector<StateId> initial;
    std::vector<std::size_t> choice_begin{0};
    std::vector<std::size_t> trans_begin{0};
    std::vector<StateId> succ;
    std::vector<double> prob;
    std::vector<Rational> exact;  // parallel to prob when the source was exact; else empty
    std::vector<std::size_t> origin;  // per choice: provenance (joint MDP: local index i*m+j)

    std::size_t num_choices() const { return trans_begin.size() - 1; }
    std::size_t num_transitions() const { return succ.size(); }
    bool has_exact() const { return !exact.empty(); }

    template <class S>
    S p(std::size_t t) const;

    // Appends one choice for the state currently being filled.
    void add_choice(std::size_t origin_tag);
    void add_transition(StateId target, double pr);
    void add_transition(StateId target, const Rational& pr);
    // Closes the current state (call after its choices were added).
    void end_state() { choice_begin.push_back(num_choices()); }
};

template <>
inline double Mdp::p<double>(std::size_t t) const { return prob[t]; }
template <>
inline Rational Mdp::p<Rational>(std::size_t t) const { return exact.empty() ? rational_from_double(prob[t]) : exact[t]; }

// Reward vectors attached to an MDP's states and choices.
struct MdpRewards {
    std::vector<Rational> state;
    std::vector<Rational> choice;
};

// MDP whose choices at s are all joint actions (i, j) of the coalition game,
// in row-major order i * cols(s) + j.
Mdp joint_mdp(const CoalitionGame& cg);

// Reward structure of the base game mapped onto joint_mdp choices.
MdpRewards joint_rewards(const CoalitionGame& cg, const RewardStructure& r);

}  // namespace csgnash
