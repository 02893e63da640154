#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "csgnash/mdp.hpp"

namespace csgnash {

enum class Optimum { Max, Min };

struct MdpOptions {
    double epsilon = 1e-6;  // relative change per sweep
    std::size_t max_iterations = 100000;
    bool allow_infinite = false;  // expected_reward: report instead of throwing
};

inline constexpr std::size_t kNoChoice = static_cast<std::size_t>(-1);

template <class S>
struct MdpResult {
    std::vector<S> values;
    // Memoryless strategy: global choice index per state.
    std::vector<std::size_t> strategy;
    // Bounded objectives: step_strategy[r][s] is the choice with r steps left.
    std::vector<std::vector<std::size_t>> step_strategy;
    // Bounded objectives: step_values[r] is the value vector with r steps left.
    std::vector<std::vector<S>> step_values;
    StateSet infinite;  // expected_reward F: states with infinite value
    std::size_t iterations = 0;
    bool converged = true;
};

// Qualitative sets for `remain U target`.
StateSet prob0_max(const Mdp& m, const StateSet& remain, const StateSet& target);  // max probability 0
StateSet prob0_min(const Mdp& m, const StateSet& remain, const StateSet& target);  // min probability 0
StateSet prob1_max(const Mdp& m, const StateSet& remain, const StateSet& target);  // max probability 1
StateSet prob1_min(const Mdp& m, const StateSet& remain, const StateSet& target);  // min probability 1

// States from which every strategy reaches `target` almost surely.
StateSet prob1_min_set(const Mdp& m, const StateSet& target);

// remain U<=bound target (unbounded when bound is empty).
template <class S>
MdpResult<S> reach_prob(const Mdp& m, const StateSet& remain, const StateSet& target, Optimum opt,
                        std::optional<std::size_t> bound = std::nullopt, const MdpOptions& options = {});

template <class S>
MdpResult<S> next_prob(const Mdp& m, const StateSet& target, Optimum opt);

enum class RewardKind { Instant, Cumulative, Reach };

struct RewardObjective {
    RewardKind kind = RewardKind::Reach;
    std::size_t bound = 0;  // I=k, C<=k
    StateSet target;        // F
};

// Expected reward. For F, states that may miss the target (minimum reach
// probability below 1 when maximising) have infinite value; this throws
// InfiniteValue unless options.allow_infinite is set.
template <class S>
MdpResult<S> expected_reward(const Mdp& m, const MdpRewards& rewards, const RewardObjective& objective, Optimum opt,
                             const MdpOptions& options = {});

}  // namespace csgnash
