#include "csgnash/mdp_engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "csgnash/end_components.hpp"
#include "csgnash/error.hpp"

namespace csgnash {

namespace {

// Predecessor lists: for each state, the (state, choice) pairs with an edge into it.
std::vector<std::vector<std::pair<StateId, std::size_t>>> predecessors(const Mdp& m) {
    std::vector<std::vector<std::pair<StateId, std::size_t>>> pre(m.num_states);
    for (StateId s = 0; s < m.num_states; ++s)
        for (std::size_t c = m.choice_begin[s]; c < m.choice_begin[s + 1]; ++c)
            for (std::size_t t = m.trans_begin[c]; t < m.trans_begin[c + 1]; ++t) pre[m.succ[t]].emplace_back(s, c);
    return pre;
}

bool all_succ_in(const Mdp& m, std::size_t c, const StateSet& set) {
    for (std::size_t t = m.trans_begin[c]; t < m.trans_begin[c + 1]; ++t)
        if (!set[m.succ[t]]) return false;
    return true;
}

bool some_succ_in(const Mdp& m, std::size_t c, const StateSet& set) {
    for (std::size_t t = m.trans_begin[c]; t < m.trans_begin[c + 1]; ++t)
        if (set[m.succ[t]]) return true;
    return false;
}

// States that can reach `goal` through `through` states (any choice, positive probability).
StateSet backward_reach(const Mdp& m, const StateSet& through, const StateSet& goal) {
    auto pre = predecessors(m);
    StateSet seen = goal;
    std::deque<StateId> queue;
    for (StateId s = 0; s < m.num_states; ++s)
        if (goal[s]) queue.push_back(s);
    while (!queue.empty()) {
        StateId t = queue.front();
        queue.pop_front();
        for (auto [s, c] : pre[t]) {
            if (seen[s] || !through[s]) continue;
            seen[s] = true;
            queue.push_back(s);
        }
    }
    return seen;
}

StateSet complement(const StateSet& a) {
    StateSet out(a.size());
    for (std::size_t s = 0; s < a.size(); ++s) out[s] = !a[s];
    return out;
}

StateSet minus(const StateSet& a, const StateSet& b) {
    StateSet out(a.size());
    for (std::size_t s = 0; s < a.size(); ++s) out[s] = a[s] && !b[s];
    return out;
}

template <class S>
S expectation(const Mdp& m, std::size_t c, const std::vector<S>& v) {
    S sum = 0;
    for (std::size_t t = m.trans_begin[c]; t < m.trans_begin[c + 1]; ++t) sum += m.p<S>(t) * v[m.succ[t]];
    return sum;
}

template <class S>
bool better(const S& a, const S& b, Optimum opt) {
    return opt == Optimum::Max ? a > b : a < b;
}

double magnitude(double x) { return std::abs(x); }
double magnitude(const Rational& x) { return std::abs(x.get_d()); }

template <class S>
double relative_change(const S& now, const S& before) {
    if constexpr (Scalar<S>::exact) {
        if (now == before) return 0.0;
    }
    double d = magnitude(S(now - before));
    return d / std::max(1.0, magnitude(now));
}

// One optimising sweep over all states not in `fixed`. `local(s, c)` is the
// choice value given the previous vector.
template <class S, class Local>
double sweep(const Mdp& m, const StateSet& fixed, Optimum opt, const std::vector<S>& prev, std::vector<S>& next,
             std::vector<std::size_t>* choice, Local&& local) {
    double change = 0.0;
    for (StateId s = 0; s < m.num_states; ++s) {
        if (fixed[s]) {
            next[s] = prev[s];
            continue;
        }
        std::size_t best_c = kNoChoice;
        S best = 0;
        for (std::size_t c = m.choice_begin[s]; c < m.choice_begin[s + 1]; ++c) {
            S q = local(s, c);
            if (best_c == kNoChoice || better(q, best, opt)) {
                best = std::move(q);
                best_c = c;
            }
        }
        change = std::max(change, relative_change(best, prev[s]));
        next[s] = std::move(best);
        if (choice) (*choice)[s] = best_c;
    }
    return change;
}

// Maximal end components of the sub-MDP formed by the `allowed` choices of
// `region` states. On return `allowed` keeps only choices inside a component;
// the result holds the component of every state (kNoChoice outside).
std::vector<std::size_t> end_components(const Mdp& m, const StateSet& region, std::vector<bool>& allowed,
                                        std::size_t& count) {
    const std::size_t n = m.num_states;
    StateSet alive = region;
    std::vector<std::size_t> comp(n, kNoChoice);
    count = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (StateId s = 0; s < n; ++s) {
            if (!alive[s]) continue;
            bool any = false;
            for (std::size_t c = m.choice_begin[s]; c < m.choice_begin[s + 1]; ++c) {
                if (allowed[c] && !all_succ_in(m, c, alive)) allowed[c] = false;
                any = any || allowed[c];
            }
            if (!any) {
                alive[s] = false;
                changed = true;
            }
        }
        std::vector<std::vector<StateId>> adj(n);
        for (StateId s = 0; s < n; ++s) {
            if (!alive[s]) continue;
            for (std::size_t c = m.choice_begin[s]; c < m.choice_begin[s + 1]; ++c)
                if (allowed[c])
                    for (std::size_t t = m.trans_begin[c]; t < m.trans_begin[c + 1]; ++t) adj[s].push_back(m.succ[t]);
        }
        std::size_t sccs = 0;
        auto scc = strongly_connected_components(adj, sccs);
        for (StateId s = 0; s < n; ++s) {
            if (!alive[s]) continue;
            for (std::size_t c = m.choice_begin[s]; c < m.choice_begin[s + 1]; ++c) {
                if (!allowed[c]) continue;
                for (std::size_t t = m.trans_begin[c]; t < m.trans_begin[c + 1]; ++t)
                    if (scc[m.succ[t]] != scc[s]) {
                        allowed[c] = false;
                        changed = true;
                        break;
                    }
            }
        }
        if (!changed) {
            std::vector<std::size_t> renumber(sccs, kNoChoice);
            for (StateId s = 0; s < n; ++s) {
                if (!alive[s]) continue;
                if (renumber[scc[s]] == kNoChoice) renumber[scc[s]] = count++;
                comp[s] = renumber[scc[s]];
            }
        }
    }
    for (StateId s = 0; s < n; ++s)
        if (!alive[s])
            for (std::size_t c = m.choice_begin[s]; c < m.choice_begin[s + 1]; ++c) allowed[c] = false;
    return comp;
}

template <class S>
S tolerance_for(const MdpOptions& options) {
    if constexpr (Scalar<S>::exact) return S(0);
    else return S(10 * options.epsilon);
}

// Choice per state that is optimal and makes progress towards `target`.
template <class S>
std::vector<std::size_t> progress_strategy(const Mdp& m, const StateSet& target, const std::vector<S>& values,
                                           const MdpOptions& options) {
    const S tol = tolerance_for<S>(options);
    std::vector<std::vector<std::size_t>> optimal(m.num_states);
    for (StateId s = 0; s < m.num_states; ++s) {
        for (std::size_t c = m.choice_begin[s]; c < m.choice_begin[s + 1]; ++c) {
            S q = expectation(m, c, values);
            S slack = values[s] - q;
            S scale = std::max<S>(S(1), values[s] < 0 ? S(-values[s]) : values[s]);
            if (slack <= tol * scale) optimal[s].push_back(c);
        }
        if (optimal[s].empty()) optimal[s].push_back(m.choice_begin[s]);
    }
    constexpr std::size_t kUnranked = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> rank(m.num_states, kUnranked);
    std::vector<std::size_t> strategy(m.num_states, kNoChoice);
    std::vector<StateId> frontier;
    for (StateId s = 0; s < m.num_states; ++s)
        if (target[s]) {
            rank[s] = 0;
            frontier.push_back(s);
        }
    auto pre = predecessors(m);
    for (std::size_t level = 1; !frontier.empty(); ++level) {
        std::vector<StateId> next;
        for (StateId t : frontier)
            for (auto [s, c] : pre[t]) {
                if (rank[s] != kUnranked || values[s] == 0) continue;
                if (std::find(optimal[s].begin(), optimal[s].end(), c) == optimal[s].end()) continue;
                rank[s] = level;
                next.push_back(s);
            }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        frontier = std::move(next);
    }
    for (StateId s = 0; s < m.num_states; ++s) {
        std::size_t best_c = optimal[s].front();
        if (rank[s] != kUnranked && rank[s] > 0) {
            std::size_t best_rank = kUnranked;
            for (std::size_t c : optimal[s]) {
                std::size_t r = kUnranked;
                for (std::size_t t = m.trans_begin[c]; t < m.trans_begin[c + 1]; ++t) r = std::min(r, rank[m.succ[t]]);
                if (r < best_rank) {
                    best_rank = r;
                    best_c = c;
                }
            }
        }
        strategy[s] = best_c;
    }
    return strategy;
}

}  // namespace

StateSet prob0_max(const Mdp& m, const StateSet& remain, const StateSet& target) {
    return complement(backward_reach(m, remain, target));
}

StateSet prob0_min(const Mdp& m, const StateSet& remain, const StateSet& target) {
    // Least fixpoint of states where every choice may reach target.
    StateSet positive = target;
    bool changed = true;
    while (changed) {
        changed = false;
        for (StateId s = 0; s < m.num_states; ++s) {
            if (positive[s] || !remain[s]) continue;
            bool all = true;
            for (std::size_t c = m.choice_begin[s]; c < m.choice_begin[s + 1] && all; ++c)
                all = some_succ_in(m, c, positive);
            if (all) {
                positive[s] = true;
                changed = true;
            }
        }
    }
    return complement(positive);
}

StateSet prob1_max(const Mdp& m, const StateSet& remain, const StateSet& target) {
    StateSet u(m.num_states, true);
    while (true) {
        StateSet r = target;
        bool grown = true;
        while (grown) {
            grown = false;
            for (StateId s = 0; s < m.num_states; ++s) {
                if (r[s] || !remain[s]) continue;
                for (std::size_t c = m.choice_begin[s]; c < m.choice_begin[s + 1]; ++c) {
                    if (all_succ_in(m, c, u) && some_succ_in(m, c, r)) {
                        r[s] = true;
                        grown = true;
                        break;
                    }
                }
            }
        }
        if (r == u) return u;
        u = std::move(r);
    }
}

StateSet prob1_min(const Mdp& m, const StateSet& remain, const StateSet& target) {
    // Min probability is below 1 exactly where a state with min probability 0
    // is reachable through remain \ target.
    StateSet zero = prob0_min(m, remain, target);
    return complement(backward_reach(m, minus(remain, target), zero));
}

StateSet prob1_min_set(const Mdp& m, const StateSet& target) {
    return prob1_min(m, StateSet(m.num_states, true), target);
}

template <class S>
MdpResult<S> reach_prob(const Mdp& m, const StateSet& remain, const StateSet& target, Optimum opt,
                        std::optional<std::size_t> bound, const MdpOptions& options) {
    MdpResult<S> out;
    const std::size_t n = m.num_states;
    std::vector<S> v(n, S(0));
    StateSet fixed(n, false);
    for (StateId s = 0; s < n; ++s) {
        if (target[s]) v[s] = 1;
        if (target[s] || !remain[s]) fixed[s] = true;
    }
    if (bound) {
        std::vector<S> next(n, S(0));
        out.step_strategy.push_back(std::vector<std::size_t>(n, kNoChoice));
        out.step_values.push_back(v);
        for (std::size_t r = 1; r <= *bound; ++r) {
            std::vector<std::size_t> choice(n, kNoChoice);
            sweep(m, fixed, opt, v, next, &choice, [&](StateId, std::size_t c) { return expectation(m, c, v); });
            std::swap(v, next);
            out.step_strategy.push_back(std::move(choice));
            out.step_values.push_back(v);
        }
        for (StateId s = 0; s < n; ++s)
            for (auto& step : out.step_strategy)
                if (step[s] == kNoChoice) step[s] = m.choice_begin[s];
        out.iterations = *bound;
        out.values = std::move(v);
        out.strategy = out.step_strategy.back();
        return out;
    }

    StateSet zero = opt == Optimum::Max ? prob0_max(m, remain, target) : prob0_min(m, remain, target);
    StateSet one = opt == Optimum::Max ? prob1_max(m, remain, target) : prob1_min(m, remain, target);
    for (StateId s = 0; s < n; ++s) {
        if (zero[s]) {
            v[s] = 0;
            fixed[s] = true;
        } else if (one[s]) {
            v[s] = 1;
            fixed[s] = true;
        }
    }
    std::vector<S> next(n, S(0));
    out.converged = false;
    std::vector<std::size_t> choice(n, kNoChoice);
    while (out.iterations < options.max_iterations) {
        double change =
            sweep(m, fixed, opt, v, next, &choice, [&](StateId, std::size_t c) { return expectation(m, c, v); });
        std::swap(v, next);
        ++out.iterations;
        if (change < options.epsilon) {
            out.converged = true;
            break;
        }
    }
    if (opt == Optimum::Max) {
        out.strategy = progress_strategy(m, target, v, options);
    } else {
        for (StateId s = 0; s < n; ++s) {
            std::size_t best_c = m.choice_begin[s];
            S best = expectation(m, best_c, v);
            for (std::size_t c = best_c + 1; c < m.choice_begin[s + 1]; ++c) {
                S q = expectation(m, c, v);
                if (q < best) {
                    best = q;
                    best_c = c;
                }
            }
            // At value 0, prefer a choice that surely avoids the target.
            if (zero[s] && !target[s]) {
                for (std::size_t c = m.choice_begin[s]; c < m.choice_begin[s + 1]; ++c)
                    if (all_succ_in(m, c, zero)) {
                        best_c = c;
                        break;
                    }
            }
            out.strategy.push_back(best_c);
        }
    }
    out.values = std::move(v);
    return out;
}

template <class S>
MdpResult<S> next_prob(const Mdp& m, const StateSet& target, Optimum opt) {
    MdpResult<S> out;
    const std::size_t n = m.num_states;
    std::vector<S> ind(n, S(0));
    for (StateId s = 0; s < n; ++s)
        if (target[s]) ind[s] = 1;
    out.values.assign(n, S(0));
    out.strategy.assign(n, kNoChoice);
    sweep(m, StateSet(n, false), opt, ind, out.values, &out.strategy,
          [&](StateId, std::size_t c) { return expectation(m, c, ind); });
    out.iterations = 1;
    return out;
}

template <class S>
MdpResult<S> expected_reward(const Mdp& m, const MdpRewards& rewards, const RewardObjective& objective, Optimum opt,
                             const MdpOptions& options) {
    MdpResult<S> out;
    const std::size_t n = m.num_states;
    auto state_reward = [&](StateId s) { return Scalar<S>::from(rewards.state[s]); };
    auto choice_reward = [&](std::size_t c) { return Scalar<S>::from(rewards.choice[c]); };
    std::vector<S> v(n, S(0)), next(n, S(0));
    const StateSet none(n, false);

    if (objective.kind == RewardKind::Instant || objective.kind == RewardKind::Cumulative) {
        const bool instant = objective.kind == RewardKind::Instant;
        if (instant)
            for (StateId s = 0; s < n; ++s) v[s] = state_reward(s);
        out.step_strategy.push_back(std::vector<std::size_t>(m.choice_begin.begin(), m.choice_begin.end() - 1));
        out.step_values.push_back(v);
        for (std::size_t r = 1; r <= objective.bound; ++r) {
            std::vector<std::size_t> choice(n, kNoChoice);
            sweep(m, none, opt, v, next, &choice, [&](StateId s, std::size_t c) {
                S q = expectation(m, c, v);
                if (!instant) q += state_reward(s) + choice_reward(c);
                return q;
            });
            std::swap(v, next);
            out.step_strategy.push_back(std::move(choice));
            out.step_values.push_back(v);
        }
        out.iterations = objective.bound;
        out.values = std::move(v);
        out.strategy = out.step_strategy.back();
        out.infinite.assign(n, false);
        return out;
    }

    const StateSet all(n, true);
    StateSet finite = opt == Optimum::Max ? prob1_min(m, all, objective.target) : prob1_max(m, all, objective.target);
    out.infinite = complement(finite);
    std::vector<StateId> bad;
    for (StateId s = 0; s < n; ++s)
        if (out.infinite[s]) bad.push_back(s);
    if (!bad.empty() && !options.allow_infinite) {
        std::string list;
        for (std::size_t k = 0; k < bad.size() && k < 10; ++k) list += (k ? ", " : "") + std::to_string(bad[k]);
        if (bad.size() > 10) list += ", ...";
        fail(ErrorCode::InfiniteValue,
             "target is not reached with probability 1 from " + std::to_string(bad.size()) + " state(s): " + list);
    }
    StateSet fixed(n, false);
    for (StateId s = 0; s < n; ++s) fixed[s] = objective.target[s] || out.infinite[s];

    // A minimiser could circle forever at no cost without reaching the target.
    // Zero-reward end components are therefore treated as single states whose
    // value is that of their best exit.
    std::vector<bool> internal(m.num_choices(), false);
    std::vector<std::size_t> comp(n, kNoChoice);
    std::size_t comps = 0;
    if (opt == Optimum::Min) {
        for (StateId s = 0; s < n; ++s) {
            if (fixed[s] || rewards.state[s] != 0) continue;
            for (std::size_t c = m.choice_begin[s]; c < m.choice_begin[s + 1]; ++c)
                internal[c] = rewards.choice[c] == 0 && all_succ_in(m, c, finite);
        }
        comp = end_components(m, complement(fixed), internal, comps);
    }

    std::vector<std::size_t> choice(n, kNoChoice);
    std::vector<S> comp_best(comps);
    std::vector<std::size_t> comp_exit(comps, kNoChoice);
    out.converged = false;
    while (out.iterations < options.max_iterations) {
        double change = 0.0;
        std::fill(comp_exit.begin(), comp_exit.end(), kNoChoice);
        for (StateId s = 0; s < n; ++s) {
            if (fixed[s]) {
                next[s] = v[s];
                continue;
            }
            std::size_t best_c = kNoChoice;
            S best = 0;
            for (std::size_t c = m.choice_begin[s]; c < m.choice_begin[s + 1]; ++c) {
                // A minimiser never leaves the region where the target is sure.
                if (opt == Optimum::Min && (!all_succ_in(m, c, finite) || internal[c])) continue;
                S q = state_reward(s) + choice_reward(c) + expectation(m, c, v);
                if (best_c == kNoChoice || better(q, best, opt)) {
                    best = std::move(q);
                    best_c = c;
                }
            }
            choice[s] = best_c;
            if (comp[s] != kNoChoice) {
                std::size_t k = comp[s];
                if (best_c != kNoChoice && (comp_exit[k] == kNoChoice || better(best, comp_best[k], opt))) {
                    comp_best[k] = best;
                    comp_exit[k] = best_c;
                }
                continue;
            }
            change = std::max(change, relative_change(best, v[s]));
            next[s] = std::move(best);
        }
        for (StateId s = 0; s < n; ++s) {
            if (comp[s] == kNoChoice) continue;
            change = std::max(change, relative_change(comp_best[comp[s]], v[s]));
            next[s] = comp_best[comp[s]];
        }
        std::swap(v, next);
        ++out.iterations;
        if (change < options.epsilon) {
            out.converged = true;
            break;
        }
    }
    if (comps > 0) {
        // Inside a component, walk along internal choices towards the state
        // holding the best exit.
        std::vector<bool> reached(n, false);
        std::deque<StateId> queue;
        for (StateId s = 0; s < n; ++s)
            if (comp[s] != kNoChoice && choice[s] == comp_exit[comp[s]]) {
                reached[s] = true;
                queue.push_back(s);
            }
        auto pre = predecessors(m);
        while (!queue.empty()) {
            StateId t = queue.front();
            queue.pop_front();
            for (auto [s, c] : pre[t]) {
                if (reached[s] || !internal[c] || comp[s] != comp[t]) continue;
                reached[s] = true;
                choice[s] = c;
                queue.push_back(s);
            }
        }
    }
    for (StateId s = 0; s < n; ++s)
        if (choice[s] == kNoChoice) choice[s] = m.choice_begin[s];
    out.values = std::move(v);
    out.strategy = std::move(choice);
    return out;
}

template MdpResult<double> reach_prob<double>(const Mdp&, const StateSet&, const StateSet&, Optimum,
                                              std::optional<std::size_t>, const MdpOptions&);
template MdpResult<Rational> reach_prob<Rational>(const Mdp&, const StateSet&, const StateSet&, Optimum,
                                                  std::optional<std::size_t>, const MdpOptions&);
template MdpResult<double> next_prob<double>(const Mdp&, const StateSet&, Optimum);
template MdpResult<Rational> next_prob<Rational>(const Mdp&, const StateSet&, Optimum);
template MdpResult<double> expected_reward<double>(const Mdp&, const MdpRewards&, const RewardObjective&, Optimum,
                                                   const MdpOptions&);
template MdpResult<Rational> expected_reward<Rational>(const Mdp&, const MdpRewards&, const RewardObjective&, Optimum,
                                                       const MdpOptions&);

}  // namespace csgnash
