#include "csgnash/csg.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "csgnash/error.hpp"

namespace csgnash {

std::optional<PlayerId> Csg::find_player(std::string_view name) const {
    for (std::size_t p = 0; p < players_.size(); ++p)
        if (players_[p] == name) return static_cast<PlayerId>(p);
    return std::nullopt;
}

const std::string& Csg::action_name(ActionId a) const {
    static const std::string idle = "_";
    if (a == kIdle) return idle;
    return action_names_[static_cast<std::size_t>(a)];
}

std::optional<ActionId> Csg::find_action(std::string_view name) const {
    for (std::size_t a = 0; a < action_names_.size(); ++a)
        if (action_names_[a] == name) return static_cast<ActionId>(a);
    return std::nullopt;
}

std::span<const ActionId> Csg::available(StateId s, PlayerId p) const {
    std::size_t k = static_cast<std::size_t>(s) * players_.size() + p;
    return {avail_.data() + avail_begin_[k], avail_begin_[k + 1] - avail_begin_[k]};
}

std::size_t Csg::row_of(StateId s, std::span<const std::size_t> positions) const {
    std::size_t offset = 0;
    for (std::size_t p = 0; p < players_.size(); ++p) {
        offset = offset * available(s, static_cast<PlayerId>(p)).size() + positions[p];
    }
    return row_begin_[s] + offset;
}

std::string Csg::joint_action_text(std::size_t row) const {
    std::string out = "(";
    auto joint = joint_action(row);
    for (std::size_t p = 0; p < joint.size(); ++p) {
        if (p) out += ",";
        out += action_name(joint[p]);
    }
    return out + ")";
}

const StateSet* Csg::label(std::string_view name) const {
    auto it = labels_.find(std::string(name));
    return it == labels_.end() ? nullptr : &it->second;
}

std::optional<std::size_t> Csg::find_reward(std::string_view name) const {
    for (std::size_t r = 0; r < rewards_.size(); ++r)
        if (rewards_[r].name == name) return r;
    return std::nullopt;
}

std::string Csg::describe_state(StateId s) const {
    if (!state_names_.empty() && !state_names_[s].empty()) return state_names_[s];
    if (variables_.empty()) return std::to_string(s);
    std::string out = "(";
    auto val = valuation(s);
    for (std::size_t v = 0; v < variables_.size(); ++v) {
        if (v) out += ",";
        out += variables_[v].name + "=";
        if (variables_[v].is_bool) out += val[v] ? "true" : "false";
        else out += std::to_string(val[v]);
    }
    return out + ")";
}

PlayerId CsgBuilder::add_player(const std::string& name) {
    players_.push_back(name);
    return static_cast<PlayerId>(players_.size() - 1);
}

ActionId CsgBuilder::add_action(PlayerId owner, const std::string& name) {
    for (std::size_t a = 0; a < action_names_.size(); ++a)
        if (action_names_[a] == name) fail(ErrorCode::AlphabetViolation, "action '" + name + "' declared twice");
    action_names_.push_back(name);
    action_owner_.push_back(owner);
    return static_cast<ActionId>(action_names_.size() - 1);
}

StateId CsgBuilder::add_state() { return static_cast<StateId>(num_states_++); }

void CsgBuilder::set_initial(StateId s) { initial_.push_back(s); }

void CsgBuilder::set_state_name(StateId s, std::string name) { names_[s] = std::move(name); }

void CsgBuilder::set_variables(std::vector<VariableInfo> vars) { variables_ = std::move(vars); }

void CsgBuilder::set_valuation(StateId s, std::vector<std::int32_t> values) { valuations_[s] = std::move(values); }

std::size_t CsgBuilder::add_row(StateId s, std::vector<ActionId> joint, std::vector<std::pair<StateId, Rational>> dist) {
    rows_.push_back(Row{s, std::move(joint), std::move(dist)});
    return rows_.size() - 1;
}

void CsgBuilder::add_label(const std::string& name, StateSet states) { labels_[name] = std::move(states); }

std::size_t CsgBuilder::add_reward(const std::string& name) {
    rewards_.push_back(RewardDraft{name, {}, {}});
    return rewards_.size() - 1;
}

void CsgBuilder::set_state_reward(std::size_t reward, StateId s, Rational value) {
    if (value < 0) fail(ErrorCode::InvalidArgument, "negative state reward in '" + rewards_[reward].name + "'");
    rewards_[reward].state[s] = std::move(value);
}

void CsgBuilder::set_action_reward(std::size_t reward, std::size_t row_handle, Rational value) {
    if (value < 0) fail(ErrorCode::InvalidArgument, "negative action reward in '" + rewards_[reward].name + "'");
    rewards_[reward].action[row_handle] = std::move(value);
}

Csg CsgBuilder::finish(bool prune_unreachable) {
    const std::size_t n = players_.size();
    if (n == 0) fail(ErrorCode::InvalidArgument, "game has no players");
    if (num_states_ == 0) fail(ErrorCode::InvalidArgument, "game has no states");
    if (initial_.empty()) fail(ErrorCode::InvalidArgument, "game has no initial state");
    const Rational sum_tolerance = inexact_ ? Rational(1, 1000000000) : Rational(0);

    // Normalise distributions and validate joint actions.
    for (auto& row : rows_) {
        if (row.state >= num_states_) fail(ErrorCode::InvalidArgument, "row for unknown state");
        if (row.joint.size() != n) fail(ErrorCode::DimensionMismatch, "joint action has wrong arity");
        for (std::size_t p = 0; p < n; ++p) {
            ActionId a = row.joint[p];
            if (a != kIdle && (a < 0 || static_cast<std::size_t>(a) >= action_names_.size() ||
                               action_owner_[static_cast<std::size_t>(a)] != p))
                fail(ErrorCode::AlphabetViolation, "action does not belong to player '" + players_[p] + "'");
        }
        std::map<StateId, Rational> merged;
        Rational total = 0;
        for (auto& [t, pr] : row.dist) {
            if (t >= num_states_) fail(ErrorCode::InvalidArgument, "transition to unknown state");
            if (pr < 0) fail(ErrorCode::ProbabilitySum, "negative probability at state " + std::to_string(row.state));
            total += pr;
            if (pr != 0) merged[t] += pr;
        }
        if (!approx_equal(total, 1, sum_tolerance))
            fail(ErrorCode::ProbabilitySum, "probabilities sum to " + to_string(total) + " at state " +
                                                 (names_.count(row.state) ? names_[row.state] : std::to_string(row.state)));
        row.dist.assign(merged.begin(), merged.end());
    }

    // Group rows per state; deadlocked states get an idle self-loop.
    std::vector<std::vector<std::size_t>> by_state(num_states_);
    for (std::size_t r = 0; r < rows_.size(); ++r) by_state[rows_[r].state].push_back(r);
    for (std::size_t s = 0; s < num_states_; ++s) {
        if (by_state[s].empty()) {
            rows_.push_back(Row{static_cast<StateId>(s), std::vector<ActionId>(n, kIdle),
                                {{static_cast<StateId>(s), Rational(1)}}});
            by_state[s].push_back(rows_.size() - 1);
        }
    }

    // Reachability.
    std::vector<bool> keep(num_states_, !prune_unreachable);
    if (prune_unreachable) {
        std::deque<StateId> queue;
        for (StateId s : initial_)
            if (!keep[s]) { keep[s] = true; queue.push_back(s); }
        while (!queue.empty()) {
            StateId s = queue.front();
            queue.pop_front();
            for (std::size_t r : by_state[s])
                for (auto& [t, pr] : rows_[r].dist)
                    if (!keep[t]) { keep[t] = true; queue.push_back(t); }
        }
    }
    std::vector<StateId> remap(num_states_, 0);
    std::size_t kept = 0;
    for (std::size_t s = 0; s < num_states_; ++s)
        if (keep[s]) remap[s] = static_cast<StateId>(kept++);

    Csg g;
    g.players_ = players_;
    g.action_names_ = action_names_;
    g.action_owner_ = action_owner_;
    g.alphabets_.assign(n, {});
    for (std::size_t a = 0; a < action_names_.size(); ++a) g.alphabets_[action_owner_[a]].push_back(static_cast<ActionId>(a));
    g.exact_model_ = !inexact_;
    g.variables_ = variables_;

    std::vector<std::size_t> row_new_index(rows_.size(), SIZE_MAX);
    g.avail_begin_.push_back(0);
    for (std::size_t s = 0; s < num_states_; ++s) {
        if (!keep[s]) continue;
        auto& rs = by_state[s];
        // Availability per player.
        std::vector<std::vector<ActionId>> av(n);
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t r : rs) av[p].push_back(rows_[r].joint[p]);
            std::sort(av[p].begin(), av[p].end());
            av[p].erase(std::unique(av[p].begin(), av[p].end()), av[p].end());
            if (av[p].size() > 1 && av[p].front() == kIdle)
                fail(ErrorCode::InvalidArgument, "player '" + players_[p] + "' both idles and acts in state " + std::to_string(s));
        }
        std::size_t expected = 1;
        for (auto& a : av) expected *= a.size();
        if (expected != rs.size())
            fail(ErrorCode::InvalidArgument, "joint actions at state " + std::to_string(s) +
                                                 " do not form the product of the players' available actions");
        std::vector<std::size_t> key(rs.size());
        for (std::size_t k = 0; k < rs.size(); ++k) {
            std::size_t off = 0;
            for (std::size_t p = 0; p < n; ++p) {
                auto pos = std::lower_bound(av[p].begin(), av[p].end(), rows_[rs[k]].joint[p]) - av[p].begin();
                off = off * av[p].size() + static_cast<std::size_t>(pos);
            }
            key[k] = off;
        }
        std::vector<std::size_t> order(rs.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
        for (std::size_t k = 0; k + 1 < order.size(); ++k)
            if (key[order[k]] == key[order[k + 1]])
                fail(ErrorCode::InvalidArgument, "duplicate joint action at state " + std::to_string(s));

        for (std::size_t p = 0; p < n; ++p) {
            g.avail_.insert(g.avail_.end(), av[p].begin(), av[p].end());
            g.avail_begin_.push_back(g.avail_.size());
        }
        for (std::size_t k : order) {
            std::size_t r = rs[k];
            row_new_index[r] = g.trans_begin_.size() - 1;
            g.joint_.insert(g.joint_.end(), rows_[r].joint.begin(), rows_[r].joint.end());
            for (auto& [t, pr] : rows_[r].dist) {
                g.succ_.push_back(remap[t]);
                g.prob_.push_back(pr.get_d());
                g.exact_.push_back(pr);
            }
            g.trans_begin_.push_back(g.succ_.size());
        }
        g.row_begin_.push_back(g.trans_begin_.size() - 1);
    }

    for (StateId s : initial_) {
        StateId t = remap[s];
        if (std::find(g.initial_.begin(), g.initial_.end(), t) == g.initial_.end()) g.initial_.push_back(t);
    }

    for (auto& [name, set] : labels_) {
        StateSet out(kept, false);
        for (std::size_t s = 0; s < num_states_ && s < set.size(); ++s)
            if (keep[s] && set[s]) out[remap[s]] = true;
        g.labels_[name] = std::move(out);
    }
    for (auto& draft : rewards_) {
        RewardStructure rs;
        rs.name = draft.name;
        rs.state.assign(kept, Rational(0));
        rs.action.assign(g.num_rows(), Rational(0));
        for (auto& [s, v] : draft.state)
            if (keep[s]) rs.state[remap[s]] = v;
        for (auto& [r, v] : draft.action)
            if (row_new_index[r] != SIZE_MAX) rs.action[row_new_index[r]] = v;
        g.rewards_.push_back(std::move(rs));
    }
    if (!variables_.empty()) {
        g.valuations_.assign(kept * variables_.size(), 0);
        for (auto& [s, vals] : valuations_)
            if (keep[s]) std::copy(vals.begin(), vals.end(), g.valuations_.begin() + static_cast<long>(remap[s] * variables_.size()));
    }
    if (!names_.empty()) {
        g.state_names_.assign(kept, "");
        for (auto& [s, name] : names_)
            if (keep[s]) g.state_names_[remap[s]] = name;
    }
    return g;
}

}  // namespace csgnash
