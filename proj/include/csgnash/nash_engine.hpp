#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "csgnash/bimatrix.hpp"
#include "csgnash/coalition.hpp"
#include "csgnash/csg.hpp"
#include "csgnash/end_components.hpp"
#include "csgnash/mdp.hpp"
#include "csgnash/property.hpp"

namespace csgnash {

enum class ObjectiveKind { Next, Until, BoundedUntil, Instant, Cumulative, ReachReward };

// One objective of a Nash pair with its state formulae already resolved to
// state sets of the game it refers to.
struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::Until;
    std::size_t bound = 0;  // BoundedUntil, Instant, Cumulative
    StateSet remain;        // Until, BoundedUntil
    StateSet target;        // Next, Until, BoundedUntil, ReachReward
    std::size_t reward = 0; // reward structure index for the reward kinds

    bool is_reward() const;
    bool finite() const;
    // Number of steps that matter (finite objectives only).
    std::size_t horizon() const;
};

struct NashProblem {
    const Csg* game = nullptr;
    std::vector<PlayerId> coalition;  // first coalition; the second is everyone else
    std::array<ObjectiveSpec, 2> objectives;
};

struct NashOptions {
    double conv_epsilon = 1e-6;  // absolute, on per-state sums and per-player values
    std::size_t max_iterations = 10000;
    bool exact = false;  // rational value iteration for infinite horizons
    bool strict_assumptions = false;
    bool synthesise = true;
    bool certify = true;  // check each local equilibrium against the LCP conditions
    std::vector<StateId> trace_states;
    std::size_t trace_limit = 0;  // iterations recorded per traced state
    double mdp_epsilon = 1e-6;
    unsigned threads = 1;
};

struct AssumptionReport {
    bool checked = false;
    bool holds = true;
    std::vector<EndComponent> non_terminal;
    std::array<std::vector<StateId>, 2> not_almost_sure;
    std::vector<std::string> messages;
};

AssumptionReport check_assumption(const NashProblem& p);

// Memory modes of a synthesised profile.
enum class Mode : std::uint8_t { BothPending, FirstDone, SecondDone, Done };
const char* mode_name(Mode m);

// Distributions over the local action tuples of the two coalitions.
struct LocalEquilibrium {
    std::vector<Rational> x;
    std::vector<Rational> y;
};

// Profile with memory (mode, step). Steps only matter for finite horizons.
struct StrategyProfile {
    bool bounded = false;
    std::array<std::size_t, 2> horizon{};  // per objective (bounded)
    std::size_t joint_steps = 0;           // min of the horizons (bounded)
    std::array<ObjectiveSpec, 2> objectives;
    // equilibrium[n][s]: n steps before the first horizon ends (bounded), or
    // equilibrium[0][s] (unbounded). Empty entries mean no choice is needed.
    std::vector<std::vector<LocalEquilibrium>> equilibrium;
    // single[l][r][s]: joint local index i*m+j of the MDP-optimal choice for
    // objective l with r steps left (bounded) or single[l][0][s] (unbounded).
    std::array<std::vector<std::vector<std::size_t>>, 2> single;

    // Steps after which every objective is resolved (bounded), else 0.
    std::size_t memory_horizon() const;
    bool resolved(int l, StateId s, std::size_t step) const;
    Mode initial_mode(StateId s) const;
    Mode next_mode(Mode m, StateId s, std::size_t step) const;
    LocalEquilibrium decide(const CoalitionGame& cg, StateId s, Mode m, std::size_t step) const;
};

struct TraceEntry {
    std::size_t iteration = 0;
    StateId state = 0;
    Rational v1;
    Rational v2;
};

struct NashResult {
    Horizon horizon = Horizon::BothInfinite;
    std::vector<std::array<double, 2>> values;  // per state of the input game
    std::vector<std::array<Rational, 2>> exact_values;  // filled when computed exactly
    bool exact = false;
    std::size_t iterations = 0;
    bool converged = true;
    bool oscillating = false;
    std::string diagnostic;
    std::vector<TraceEntry> trace;
    AssumptionReport assumption;
    std::optional<StrategyProfile> profile;

    // Problem actually solved: the input, or the product game for mixed horizons.
    std::shared_ptr<const Csg> product;
    NashProblem solved;
    std::vector<StateId> embedding;  // input state -> solved-game state
    std::vector<StateId> starts;     // solved-game states of the input's initial states

    double mdp_seconds = 0.0;
    double csg_seconds = 0.0;
    std::size_t local_games = 0;

    double sum(StateId s) const { return values[s][0] + values[s][1]; }
};

NashResult solve_nash(const NashProblem& p, const NashOptions& options = {});

// Local game at s with payoffs add^l + sum_s' delta(s,(i,j))(s') * cont[s'][l].
// A null reward adds nothing.
BimatrixGame local_game(const CoalitionGame& cg, StateId s, const std::vector<std::array<Rational, 2>>& cont,
                        const std::array<const RewardStructure*, 2>& add = {nullptr, nullptr});

// Reduction of a pair with exactly one finite objective to a pair of
// infinite-horizon objectives on a layered product game.
struct ProductGame {
    std::shared_ptr<Csg> game;
    NashProblem problem;
    std::vector<StateId> embedding;  // s -> (s, 0)
    std::vector<StateId> base_state;  // product state -> s
    std::vector<std::size_t> layer;   // product state -> layer
};

ProductGame mixed_horizon_product(const NashProblem& p);

// MDP on (state, mode, step) obtained by fixing the profile for every
// coalition except `free_side` (0 or 1; -1 fixes both).
struct InducedMdp {
    Mdp mdp;
    std::array<MdpRewards, 2> rewards;
    std::vector<StateId> base_state;
    std::vector<Mode> mode;
    std::vector<std::size_t> step;
    std::vector<StateId> starts;  // induced states of the requested start states
};

InducedMdp induce_mdp(const NashProblem& p, const StrategyProfile& profile, int free_side,
                      const std::vector<StateId>& starts);

struct VerifyReport {
    std::array<double, 2> achieved{};
    std::array<double, 2> best{};
    std::array<double, 2> gap{};
    std::array<double, 2> worst_reachable_gap{};  // over all reachable (state, mode, step)
    std::size_t induced_states = 0;
    bool pass = false;
};

VerifyReport verify_epsilon_ne(const NashProblem& p, const StrategyProfile& profile, double epsilon,
                               const std::vector<StateId>& starts);

// Strategy export (JSON text).
std::string profile_json(const NashProblem& p, const StrategyProfile& profile, const std::string& query,
                         const std::vector<StateId>& starts, const NashResult* result = nullptr);

}  // namespace csgnash
