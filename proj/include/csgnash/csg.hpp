#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csgnash/rational.hpp"

namespace csgnash {

using StateId = std::uint32_t;
using PlayerId = std::uint32_t;
using ActionId = std::int32_t;
inline constexpr ActionId kIdle = -1;

using StateSet = std::vector<bool>;

struct RewardStructure {
    std::string name;
    std::vector<Rational> state;   // per state
    std::vector<Rational> action;  // per row (defined joint action)
};

struct VariableInfo {
    std::string name;
    std::int32_t low = 0;
    std::int32_t high = 0;
    bool is_bool = false;
};

// Concurrent stochastic game with explicit sparse transitions.
//
// Rows of a state enumerate the product A_1(s) x ... x A_n(s) in lexicographic
// order (player 1 slowest, each A_i(s) sorted by action id). A player with no
// enabled action has A_i(s) = {kIdle}.
class Csg {
public:
    std::size_t num_players() const { return players_.size(); }
    const std::string& player_name(PlayerId p) const { return players_[p]; }
    std::optional<PlayerId> find_player(std::string_view name) const;

    std::size_t num_actions() const { return action_names_.size(); }
    const std::string& action_name(ActionId a) const;
    PlayerId action_owner(ActionId a) const { return action_owner_[static_cast<std::size_t>(a)]; }
    std::optional<ActionId> find_action(std::string_view name) const;
    // Declared alphabet A_i.
    const std::vector<ActionId>& alphabet(PlayerId p) const { return alphabets_[p]; }

    std::size_t num_states() const { return row_begin_.size() - 1; }
    std::size_t num_rows() const { return trans_begin_.size() - 1; }
    std::size_t num_transitions() const { return succ_.size(); }
    const std::vector<StateId>& initial_states() const { return initial_; }

    std::span<const ActionId> available(StateId s, PlayerId p) const;
    std::size_t row_begin(StateId s) const { return row_begin_[s]; }
    std::size_t row_end(StateId s) const { return row_begin_[s + 1]; }
    std::span<const ActionId> joint_action(std::size_t row) const {
        return {joint_.data() + row * players_.size(), players_.size()};
    }
    std::size_t trans_begin(std::size_t row) const { return trans_begin_[row]; }
    std::size_t trans_end(std::size_t row) const { return trans_begin_[row + 1]; }
    StateId succ(std::size_t t) const { return succ_[t]; }
    double prob(std::size_t t) const { return prob_[t]; }
    const Rational& exact_prob(std::size_t t) const { return exact_[t]; }
    // True when every probability came from exact rational arithmetic.
    bool exact() const { return exact_model_; }

    // Row for per-player positions into available(s, p).
    std::size_t row_of(StateId s, std::span<const std::size_t> positions) const;
    std::string joint_action_text(std::size_t row) const;

    const std::map<std::string, StateSet>& labels() const { return labels_; }
    const StateSet* label(std::string_view name) const;

    const std::vector<RewardStructure>& rewards() const { return rewards_; }
    std::optional<std::size_t> find_reward(std::string_view name) const;

    const std::vector<VariableInfo>& variables() const { return variables_; }
    std::span<const std::int32_t> valuation(StateId s) const {
        return {valuations_.data() + static_cast<std::size_t>(s) * variables_.size(), variables_.size()};
    }
    const std::vector<std::string>& state_names() const { return state_names_; }
    std::string describe_state(StateId s) const;

private:
    friend class CsgBuilder;

    std::vector<std::string> players_;
    std::vector<std::vector<ActionId>> alphabets_;
    std::vector<std::string> action_names_;
    std::vector<PlayerId> action_owner_;

    std::vector<StateId> initial_;
    std::vector<std::size_t> avail_begin_;  // per (state, player)
    std::vector<ActionId> avail_;
    std::vector<std::size_t> row_begin_{0};
    std::vector<ActionId> joint_;
    std::vector<std::size_t> trans_begin_{0};
    std::vector<StateId> succ_;
    std::vector<double> prob_;
    std::vector<Rational> exact_;
    bool exact_model_ = true;

    std::map<std::string, StateSet> labels_;
    std::vector<RewardStructure> rewards_;
    std::vector<VariableInfo> variables_;
    std::vector<std::int32_t> valuations_;
    std::vector<std::string> state_names_;
};

// Assembles a Csg. Rows may be added in any order; finish() sorts them into
// the canonical order, derives availability sets, validates the game and
// (optionally) drops states unreachable from the initial states.
class CsgBuilder {
public:
    PlayerId add_player(const std::string& name);
    ActionId add_action(PlayerId owner, const std::string& name);

    StateId add_state();
    void set_initial(StateId s);
    void set_state_name(StateId s, std::string name);
    void set_variables(std::vector<VariableInfo> vars);
    void set_valuation(StateId s, std::vector<std::int32_t> values);

    // Returns a handle usable with set_action_reward.
    std::size_t add_row(StateId s, std::vector<ActionId> joint, std::vector<std::pair<StateId, Rational>> dist);
    void mark_inexact() { inexact_ = true; }

    void add_label(const std::string& name, StateSet states);
    std::size_t add_reward(const std::string& name);
    void set_state_reward(std::size_t reward, StateId s, Rational value);
    void set_action_reward(std::size_t reward, std::size_t row_handle, Rational value);

    Csg finish(bool prune_unreachable = true);

private:
    struct Row {
        StateId state;
        std::vector<ActionId> joint;
        std::vector<std::pair<StateId, Rational>> dist;
    };
    struct RewardDraft {
        std::string name;
        std::map<StateId, Rational> state;
        std::map<std::size_t, Rational> action;
    };

    std::vector<std::string> players_;
    std::vector<std::string> action_names_;
    std::vector<PlayerId> action_owner_;
    std::size_t num_states_ = 0;
    std::vector<StateId> initial_;
    std::map<StateId, std::string> names_;
    std::vector<VariableInfo> variables_;
    std::map<StateId, std::vector<std::int32_t>> valuations_;
    std::vector<Row> rows_;
    std::map<std::string, StateSet> labels_;
    std::vector<RewardDraft> rewards_;
    bool inexact_ = false;
};

}  // namespace csgnash
