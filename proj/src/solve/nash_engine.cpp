#include "csgnash/nash_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "csgnash/error.hpp"
#include "csgnash/mdp_engine.hpp"

namespace csgnash {

bool ObjectiveSpec::is_reward() const {
    return kind == ObjectiveKind::Instant || kind == ObjectiveKind::Cumulative || kind == ObjectiveKind::ReachReward;
}

bool ObjectiveSpec::finite() const { return kind != ObjectiveKind::Until && kind != ObjectiveKind::ReachReward; }

std::size_t ObjectiveSpec::horizon() const {
    if (kind == ObjectiveKind::Next) return 1;
    return finite() ? bound : 0;
}

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::BothPending: return "both-pending";
        case Mode::FirstDone: return "target1-done";
        case Mode::SecondDone: return "target2-done";
        case Mode::Done: return "done";
    }
    return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <class S>
using Pair = std::array<S, 2>;

// Outcome of an objective fixed by the current state alone, if any.
std::optional<int> state_outcome(const ObjectiveSpec& o, StateId s) {
    switch (o.kind) {
        case ObjectiveKind::Until:
        case ObjectiveKind::BoundedUntil:
            if (o.target[s]) return 1;
            if (!o.remain[s]) return 0;
            return std::nullopt;
        case ObjectiveKind::ReachReward:
            if (o.target[s]) return 0;
            return std::nullopt;
        default:
            return std::nullopt;
    }
}

Mode make_mode(bool first, bool second) {
    if (first && second) return Mode::Done;
    if (first) return Mode::FirstDone;
    if (second) return Mode::SecondDone;
    return Mode::BothPending;
}

std::vector<Rational> unit(std::size_t n, std::size_t k) {
    std::vector<Rational> v(n, Rational(0));
    v[k] = 1;
    return v;
}

}  // namespace

std::size_t StrategyProfile::memory_horizon() const {
    return bounded ? std::max(horizon[0], horizon[1]) : 0;
}

bool StrategyProfile::resolved(int l, StateId s, std::size_t step) const {
    const ObjectiveSpec& o = objectives[l];
    if (bounded && step >= horizon[l]) return true;
    return state_outcome(o, s).has_value();
}

Mode StrategyProfile::initial_mode(StateId s) const { return next_mode(Mode::BothPending, s, 0); }

Mode StrategyProfile::next_mode(Mode m, StateId s, std::size_t step) const {
    bool first = m == Mode::FirstDone || m == Mode::Done || resolved(0, s, step);
    bool second = m == Mode::SecondDone || m == Mode::Done || resolved(1, s, step);
    return make_mode(first, second);
}

LocalEquilibrium StrategyProfile::decide(const CoalitionGame& cg, StateId s, Mode m, std::size_t step) const {
    const std::size_t l = cg.rows(s), w = cg.cols(s);
    auto incomplete = [&]() -> LocalEquilibrium {
        fail(ErrorCode::IncompleteStrategy, "profile has no choice for state " + std::to_string(s) + " in mode " +
                                                mode_name(m) + " at step " + std::to_string(step));
    };
    switch (m) {
        case Mode::BothPending: {
            std::size_t n = 0;
            if (bounded) {
                if (step >= joint_steps) return incomplete();
                n = joint_steps - step;
            }
            if (n >= equilibrium.size() || s >= equilibrium[n].size() || equilibrium[n][s].x.empty())
                return incomplete();
            return equilibrium[n][s];
        }
        case Mode::FirstDone:
        case Mode::SecondDone: {
            int pending = m == Mode::FirstDone ? 1 : 0;
            std::size_t r = 0;
            if (bounded) {
                if (step >= horizon[pending]) return LocalEquilibrium{unit(l, 0), unit(w, 0)};
                r = horizon[pending] - step;
            }
            const auto& table = single[pending];
            if (r >= table.size() || s >= table[r].size() || table[r][s] >= l * w) return incomplete();
            std::size_t c = table[r][s];
            return LocalEquilibrium{unit(l, c / w), unit(w, c % w)};
        }
        case Mode::Done:
            return LocalEquilibrium{unit(l, 0), unit(w, 0)};
    }
    return incomplete();
}

namespace {

template <class S>
S trans_prob(const Csg& g, std::size_t t) {
    if constexpr (Scalar<S>::exact) return g.exact_prob(t);
    else return g.prob(t);
}

template <class S>
void fill_local(const CoalitionGame& cg, StateId s, const std::vector<Pair<S>>& cont,
                const std::array<const RewardStructure*, 2>& add, std::vector<S>& z1, std::vector<S>& z2) {
    const Csg& g = cg.base();
    const std::size_t l = cg.rows(s), m = cg.cols(s);
    z1.assign(l * m, S(0));
    z2.assign(l * m, S(0));
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t row = cg.row(s, i, j);
            S a = 0, b = 0;
            for (std::size_t t = g.trans_begin(row); t < g.trans_end(row); ++t) {
                S p = trans_prob<S>(g, t);
                const auto& v = cont[g.succ(t)];
                a += p * v[0];
                b += p * v[1];
            }
            if (add[0]) a += Scalar<S>::from(add[0]->state[s]) + Scalar<S>::from(add[0]->action[row]);
            if (add[1]) b += Scalar<S>::from(add[1]->state[s]) + Scalar<S>::from(add[1]->action[row]);
            z1[i * m + j] = std::move(a);
            z2[i * m + j] = std::move(b);
        }
}

template <class S>
struct LocalSolution {
    S u = 0;
    S v = 0;
    LocalEquilibrium eq;
};

template <class S>
LocalSolution<S> solve_local(const std::vector<S>& z1, const std::vector<S>& z2, std::size_t l, std::size_t m,
                             const Rational& tolerance, bool certify) {
    LocalSolution<S> out;
    if (l == 1 && m == 1) {
        out.u = z1[0];
        out.v = z2[0];
        out.eq.x = {Rational(1)};
        out.eq.y = {Rational(1)};
        return out;
    }
    BimatrixGame bg(l, m);
    for (std::size_t k = 0; k < l * m; ++k) {
        bg.z1[k] = Scalar<S>::to_rational(z1[k]);
        bg.z2[k] = Scalar<S>::to_rational(z2[k]);
    }
    SwneOptions options;
    options.tolerance = tolerance;
    SwneSolution sol = solve_swne(bg, options);
    if (certify && !is_equilibrium(bg, sol.profile.x, sol.profile.y, sol.profile.u, sol.profile.v, 0))
        fail(ErrorCode::Internal, "local equilibrium fails the complementarity conditions");
    out.u = Scalar<S>::from(sol.profile.u);
    out.v = Scalar<S>::from(sol.profile.v);
    out.eq.x = std::move(sol.profile.x);
    out.eq.y = std::move(sol.profile.y);
    return out;
}

// Runs body(s) for every listed state, on up to `threads` workers.
template <class F>
void for_states(const std::vector<StateId>& states, unsigned threads, F&& body) {
    if (threads <= 1 || states.size() < 64) {
        for (StateId s : states) body(s);
        return;
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(states.size() / 32));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (states.size() + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t k = w * chunk; k < std::min(states.size(), (w + 1) * chunk); ++k) body(states[k]);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string state_text(const Csg& g, StateId s) { return g.describe_state(s); }

std::array<const RewardStructure*, 2> reward_ptrs(const NashProblem& p) {
    std::array<const RewardStructure*, 2> out{nullptr, nullptr};
    for (int l = 0; l < 2; ++l) {
        const ObjectiveSpec& o = p.objectives[l];
        if (!o.is_reward()) continue;
        if (o.reward >= p.game->rewards().size()) fail(ErrorCode::UnknownReward, "reward index out of range");
        out[l] = &p.game->rewards()[o.reward];
    }
    return out;
}

void validate(const NashProblem& p) {
    if (!p.game) fail(ErrorCode::InvalidArgument, "Nash problem without a game");
    const std::size_t n = p.game->num_states();
    for (const auto& o : p.objectives) {
        bool needs_remain = o.kind == ObjectiveKind::Until || o.kind == ObjectiveKind::BoundedUntil;
        bool needs_target = o.kind != ObjectiveKind::Instant && o.kind != ObjectiveKind::Cumulative;
        if ((needs_remain && o.remain.size() != n) || (needs_target && o.target.size() != n))
            fail(ErrorCode::DimensionMismatch, "objective state sets do not match the game");
    }
}

// Per-objective MDP values when the coalitions collaborate.
template <class S>
struct MdpTable {
    std::vector<std::vector<S>> values;               // [r][s]; unbounded uses [0]
    std::vector<std::vector<std::size_t>> strategy;   // [r][s] local joint index
    StateSet infinite;
};

template <class S>
std::vector<std::size_t> local_choices(const Mdp& m, const std::vector<std::size_t>& global) {
    std::vector<std::size_t> out(m.num_states, 0);
    for (StateId s = 0; s < m.num_states; ++s)
        out[s] = global.empty() || global[s] == kNoChoice ? 0 : global[s] - m.choice_begin[s];
    return out;
}

template <class S>
MdpTable<S> objective_table(const Mdp& joint, const MdpRewards* rewards, const ObjectiveSpec& o,
                            const MdpOptions& options) {
    MdpTable<S> out;
    const std::size_t n = joint.num_states;
    auto take = [&](MdpResult<S>&& r, bool steps) {
        if (steps) {
            out.values = std::move(r.step_values);
            for (auto& st : r.step_strategy) out.strategy.push_back(local_choices<S>(joint, st));
        } else {
            out.values.push_back(std::move(r.values));
            out.strategy.push_back(local_choices<S>(joint, r.strategy));
        }
        out.infinite = r.infinite.empty() ? StateSet(n, false) : r.infinite;
    };
    switch (o.kind) {
        case ObjectiveKind::Next: {
            std::vector<S> ind(n, S(0));
            for (StateId s = 0; s < n; ++s)
                if (o.target[s]) ind[s] = 1;
            auto r = next_prob<S>(joint, o.target, Optimum::Max);
            out.values = {std::move(ind), std::move(r.values)};
            out.strategy = {std::vector<std::size_t>(n, 0), local_choices<S>(joint, r.strategy)};
            out.infinite.assign(n, false);
            break;
        }
        case ObjectiveKind::BoundedUntil:
            take(reach_prob<S>(joint, o.remain, o.target, Optimum::Max, o.bound, options), true);
            break;
        case ObjectiveKind::Until:
            take(reach_prob<S>(joint, o.remain, o.target, Optimum::Max, std::nullopt, options), false);
            break;
        case ObjectiveKind::Instant:
        case ObjectiveKind::Cumulative: {
            RewardObjective ro;
            ro.kind = o.kind == ObjectiveKind::Instant ? RewardKind::Instant : RewardKind::Cumulative;
            ro.bound = o.bound;
            take(expected_reward<S>(joint, *rewards, ro, Optimum::Max, options), true);
            break;
        }
        case ObjectiveKind::ReachReward: {
            RewardObjective ro;
            ro.kind = RewardKind::Reach;
            ro.target = o.target;
            MdpOptions opt = options;
            opt.allow_infinite = true;
            take(expected_reward<S>(joint, *rewards, ro, Optimum::Max, opt), false);
            break;
        }
    }
    return out;
}

template <class S>
Rational exact_of(const S& x) {
    return Scalar<S>::to_rational(x);
}

// Backwards induction for two finite-horizon objectives, in exact arithmetic.
void solve_bounded(const NashProblem& p, const NashOptions& opt, NashResult& out) {
    const Csg& g = *p.game;
    CoalitionGame cg(g, p.coalition);
    const std::size_t ns = g.num_states();
    const auto add = reward_ptrs(p);
    const ObjectiveSpec& o1 = p.objectives[0];
    const ObjectiveSpec& o2 = p.objectives[1];

    auto t0 = Clock::now();
    Mdp joint = joint_mdp(cg);
    MdpOptions mo;
    mo.epsilon = opt.mdp_epsilon;
    std::array<MdpRewards, 2> jr;
    std::array<MdpTable<Rational>, 2> table;
    for (int l = 0; l < 2; ++l) {
        if (add[l]) jr[l] = joint_rewards(cg, *add[l]);
        table[l] = objective_table<Rational>(joint, add[l] ? &jr[l] : nullptr, p.objectives[l], mo);
    }
    out.mdp_seconds += seconds_since(t0);

    auto t1 = Clock::now();
    const std::size_t k1 = o1.horizon(), k2 = o2.horizon();
    const std::size_t k = std::min(k1, k2), n1 = k1 - k, n2 = k2 - k;
    std::vector<Pair<Rational>> v(ns), next(ns);
    for (StateId s = 0; s < ns; ++s) {
        if (n1 == 0 && n2 == 0) v[s] = {table[0].values[0][s], table[1].values[0][s]};
        else if (n1 == 0) v[s] = {table[0].values[0][s], table[1].values[n2][s]};
        else v[s] = {table[0].values[n1][s], table[1].values[0][s]};
    }

    StrategyProfile prof;
    prof.bounded = true;
    prof.horizon = {k1, k2};
    prof.joint_steps = k;
    prof.objectives = p.objectives;
    if (opt.synthesise) prof.equilibrium.assign(k + 1, std::vector<LocalEquilibrium>(ns));
    const std::array<const RewardStructure*, 2> step_add{o1.kind == ObjectiveKind::Cumulative ? add[0] : nullptr,
                                                         o2.kind == ObjectiveKind::Cumulative ? add[1] : nullptr};
    const bool until1 = o1.kind == ObjectiveKind::BoundedUntil, until2 = o2.kind == ObjectiveKind::BoundedUntil;

    std::vector<StateId> all(ns);
    for (StateId s = 0; s < ns; ++s) all[s] = s;
    std::size_t games = 0;
    for (std::size_t n = 1; n <= k; ++n) {
        const std::size_t r1 = n + n1, r2 = n + n2;
        std::vector<std::size_t> solved(ns, 0);
        for_states(all, opt.threads, [&](StateId s) {
            std::optional<int> a = until1 ? state_outcome(o1, s) : std::nullopt;
            std::optional<int> b = until2 ? state_outcome(o2, s) : std::nullopt;
            if (a && b) {
                next[s] = {Rational(*a), Rational(*b)};
            } else if (a) {
                next[s] = {Rational(*a), table[1].values[r2][s]};
            } else if (b) {
                next[s] = {table[0].values[r1][s], Rational(*b)};
            } else {
                std::vector<Rational> z1, z2;
                fill_local<Rational>(cg, s, v, step_add, z1, z2);
                auto sol = solve_local<Rational>(z1, z2, cg.rows(s), cg.cols(s), 0, opt.certify);
                next[s] = {sol.u, sol.v};
                if (opt.synthesise) prof.equilibrium[n][s] = std::move(sol.eq);
                solved[s] = 1;
            }
        });
        for (auto c : solved) games += c;
        std::swap(v, next);
        if (n <= opt.trace_limit)
            for (StateId s : opt.trace_states)
                if (s < ns) out.trace.push_back({n, s, v[s][0], v[s][1]});
    }
    out.csg_seconds += seconds_since(t1);
    out.local_games = games;
    out.iterations = k;
    out.exact = true;
    out.converged = true;
    out.exact_values = v;
    out.values.resize(ns);
    for (StateId s = 0; s < ns; ++s) out.values[s] = {v[s][0].get_d(), v[s][1].get_d()};
    if (opt.synthesise) {
        for (int l = 0; l < 2; ++l) prof.single[l] = std::move(table[l].strategy);
        out.profile = std::move(prof);
    }
}

template <class S>
double magnitude(const S& x) {
    if constexpr (Scalar<S>::exact) return std::abs(x.get_d());
    else return std::abs(x);
}

template <class S>
bool same(const std::vector<S>& a, const std::vector<S>& b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// Value iteration for two infinite-horizon objectives.
template <class S>
void solve_unbounded(const NashProblem& p, const NashOptions& opt, NashResult& out) {
    const Csg& g = *p.game;
    CoalitionGame cg(g, p.coalition);
    const std::size_t ns = g.num_states();
    const auto add = reward_ptrs(p);
    const ObjectiveSpec& o1 = p.objectives[0];
    const ObjectiveSpec& o2 = p.objectives[1];

    auto t0 = Clock::now();
    Mdp joint = joint_mdp(cg);
    MdpOptions mo;
    mo.epsilon = opt.mdp_epsilon;
    std::array<MdpRewards, 2> jr;
    std::array<MdpTable<S>, 2> table;
    std::array<bool, 2> needed{false, false};
    for (StateId s = 0; s < ns; ++s) {
        bool a = state_outcome(o1, s).has_value(), b = state_outcome(o2, s).has_value();
        if (a && !b) needed[1] = true;
        if (b && !a) needed[0] = true;
    }
    for (int l = 0; l < 2; ++l) {
        if (add[l]) jr[l] = joint_rewards(cg, *add[l]);
        if (needed[l] || opt.synthesise)
            table[l] = objective_table<S>(joint, add[l] ? &jr[l] : nullptr, p.objectives[l], mo);
    }
    out.mdp_seconds += seconds_since(t0);

    auto t1 = Clock::now();
    std::vector<Pair<S>> v(ns, Pair<S>{S(0), S(0)}), next(ns), before(ns);
    std::vector<StateId> pending;
    for (StateId s = 0; s < ns; ++s) {
        auto a = state_outcome(o1, s);
        auto b = state_outcome(o2, s);
        auto single = [&](int l) -> S {
            if (table[l].infinite[s])
                fail(ErrorCode::InfiniteValue, "objective " + std::to_string(l + 1) +
                                                   " has infinite maximal expected reward at state " + state_text(g, s));
            return table[l].values[0][s];
        };
        if (a && b) v[s] = {S(*a), S(*b)};
        else if (a) v[s] = {S(*a), single(1)};
        else if (b) v[s] = {single(0), S(*b)};
        else pending.push_back(s);
    }
    next = v;
    before = v;

    StrategyProfile prof;
    prof.bounded = false;
    prof.objectives = p.objectives;
    std::vector<LocalEquilibrium> chosen(ns);
    std::vector<Pair<S>> chosen_value(ns);
    std::vector<bool> has_choice(ns, false);
    std::vector<std::vector<S>> cache1(ns), cache2(ns);
    std::vector<LocalSolution<S>> cached(ns);
    const Rational swne_tol = Scalar<S>::exact ? Rational(0) : Rational(1, 1000000000);
    const S keep_tol = Scalar<S>::exact ? S(0) : S(opt.conv_epsilon);
    const std::array<const RewardStructure*, 2> step_add{add[0], add[1]};

    std::size_t games = 0;
    bool small_before = false;
    std::size_t periodic = 0;
    out.converged = false;
    double dsum = 0.0, dval = 0.0;
    std::size_t n = 0;
    while (n < opt.max_iterations) {
        ++n;
        std::vector<std::size_t> solved(ns, 0);
        for_states(pending, opt.threads, [&](StateId s) {
            std::vector<S> z1, z2;
            fill_local<S>(cg, s, v, step_add, z1, z2);
            if (!(same(z1, cache1[s]) && same(z2, cache2[s]))) {
                cached[s] = solve_local<S>(z1, z2, cg.rows(s), cg.cols(s), swne_tol, opt.certify);
                cache1[s] = std::move(z1);
                cache2[s] = std::move(z2);
                solved[s] = 1;
            }
            const auto& sol = cached[s];
            next[s] = {sol.u, sol.v};
            if (opt.synthesise) {
                bool keep = has_choice[s] && magnitude(S(sol.u - chosen_value[s][0])) <= magnitude(keep_tol) &&
                            magnitude(S(sol.v - chosen_value[s][1])) <= magnitude(keep_tol);
                if (!keep) {
                    chosen[s] = sol.eq;
                    chosen_value[s] = next[s];
                    has_choice[s] = true;
                }
            }
        });
        for (auto c : solved) games += c;

        dsum = 0.0;
        dval = 0.0;
        double dperiod = 0.0;
        for (StateId s : pending) {
            dsum = std::max(dsum, magnitude(S((next[s][0] + next[s][1]) - (v[s][0] + v[s][1]))));
            dval = std::max({dval, magnitude(S(next[s][0] - v[s][0])), magnitude(S(next[s][1] - v[s][1]))});
            dperiod = std::max({dperiod, magnitude(S(next[s][0] - before[s][0])), magnitude(S(next[s][1] - before[s][1]))});
        }
        std::swap(before, v);
        std::swap(v, next);
        if (n <= opt.trace_limit)
            for (StateId s : opt.trace_states)
                if (s < ns) out.trace.push_back({n, s, exact_of(v[s][0]), exact_of(v[s][1])});

        const bool small = dsum < opt.conv_epsilon && dval < opt.conv_epsilon;
        if (small && (small_before || n == 1)) {
            out.converged = true;
            break;
        }
        small_before = small;
        // Period-two cycle: values return to those two sweeps back but differ
        // from the previous sweep.
        if (n >= 3 && dperiod < opt.conv_epsilon && dval >= opt.conv_epsilon) {
            if (++periodic >= 4) {
                out.oscillating = true;
                break;
            }
        } else {
            periodic = 0;
        }
    }
    out.iterations = n;
    out.local_games = games;
    out.csg_seconds += seconds_since(t1);

    if (!out.converged) {
        std::ostringstream msg;
        if (out.oscillating) {
            std::vector<StateId> osc;
            for (StateId s : pending)
                if (magnitude(S(v[s][0] - before[s][0])) >= opt.conv_epsilon ||
                    magnitude(S(v[s][1] - before[s][1])) >= opt.conv_epsilon)
                    osc.push_back(s);
            msg << "values oscillate with period 2 after " << n << " iterations";
            msg << (dsum < opt.conv_epsilon ? " (sums converged, individual values did not)" : " (sums oscillate too)");
            if (!osc.empty()) {
                StateId s = osc.front();
                msg << "; at " << state_text(g, s) << ": (" << to_string(exact_of(before[s][0])) << ", "
                    << to_string(exact_of(before[s][1])) << ") / (" << to_string(exact_of(v[s][0])) << ", "
                    << to_string(exact_of(v[s][1])) << ")";
                if (osc.size() > 1) msg << " and " << osc.size() - 1 << " more state(s)";
            }
        } else {
            msg << "no convergence after " << n << " iterations (max sum change " << dsum << ", max value change "
                << dval << ")";
            if (dsum < opt.conv_epsilon) msg << "; sums converged but individual values still change";
        }
        out.diagnostic = msg.str();
    }

    out.exact = Scalar<S>::exact;
    out.values.resize(ns);
    for (StateId s = 0; s < ns; ++s) out.values[s] = {to_double(v[s][0]), to_double(v[s][1])};
    if constexpr (Scalar<S>::exact) out.exact_values = v;
    if (opt.synthesise) {
        prof.equilibrium.assign(1, std::vector<LocalEquilibrium>(ns));
        for (StateId s : pending) prof.equilibrium[0][s] = std::move(chosen[s]);
        for (int l = 0; l < 2; ++l) prof.single[l] = std::move(table[l].strategy);
        out.profile = std::move(prof);
    }
}

}  // namespace

BimatrixGame local_game(const CoalitionGame& cg, StateId s, const std::vector<std::array<Rational, 2>>& cont,
                        const std::array<const RewardStructure*, 2>& add) {
    if (cont.size() != cg.num_states()) fail(ErrorCode::DimensionMismatch, "continuation does not cover the game");
    std::vector<Rational> z1, z2;
    fill_local<Rational>(cg, s, cont, add, z1, z2);
    BimatrixGame bg(cg.rows(s), cg.cols(s));
    bg.z1 = std::move(z1);
    bg.z2 = std::move(z2);
    return bg;
}

AssumptionReport check_assumption(const NashProblem& p) {
    validate(p);
    AssumptionReport rep;
    const Csg& g = *p.game;
    if (p.objectives[0].finite() || p.objectives[1].finite()) return rep;
    rep.checked = true;
    const std::size_t ns = g.num_states();
    auto name_list = [&](const std::vector<StateId>& states) {
        std::string s = "{";
        for (std::size_t k = 0; k < states.size() && k < 8; ++k) s += (k ? ", " : "") + state_text(g, states[k]);
        if (states.size() > 8) s += ", ... (" + std::to_string(states.size()) + " states)";
        return s + "}";
    };
    if (!p.objectives[0].is_reward()) {
        StateSet both(ns, false);
        for (StateId s = 0; s < ns; ++s)
            both[s] = !state_outcome(p.objectives[0], s) && !state_outcome(p.objectives[1], s);
        constexpr std::size_t kListed = 5;
        for (auto& ec : enumerate_mecs(g, &both)) {
            if (!ec.non_terminal) continue;
            if (rep.non_terminal.size() < kListed)
                rep.messages.push_back("non-terminal end component " + name_list(ec.states));
            rep.non_terminal.push_back(std::move(ec));
        }
        if (rep.non_terminal.size() > kListed)
            rep.messages.push_back("... " + std::to_string(rep.non_terminal.size() - kListed) +
                                   " more non-terminal end components");
    } else {
        CoalitionGame cg(g, p.coalition);
        Mdp joint = joint_mdp(cg);
        for (int l = 0; l < 2; ++l) {
            StateSet sure = prob1_min_set(joint, p.objectives[l].target);
            for (StateId s = 0; s < ns; ++s)
                if (!sure[s]) rep.not_almost_sure[l].push_back(s);
            if (!rep.not_almost_sure[l].empty())
                rep.messages.push_back("target of objective " + std::to_string(l + 1) +
                                       " is not reached almost surely under every profile from " +
                                       name_list(rep.not_almost_sure[l]));
        }
    }
    rep.holds = rep.messages.empty();
    return rep;
}

NashResult solve_nash(const NashProblem& p, const NashOptions& options) {
    validate(p);
    NashResult out;
    const bool f1 = p.objectives[0].finite(), f2 = p.objectives[1].finite();
    out.horizon = f1 && f2 ? Horizon::BothFinite
                           : (!f1 && !f2 ? Horizon::BothInfinite : (f1 ? Horizon::FirstFinite : Horizon::SecondFinite));
    const std::size_t ns = p.game->num_states();

    if (out.horizon == Horizon::BothFinite) {
        out.solved = p;
        out.embedding.resize(ns);
        for (StateId s = 0; s < ns; ++s) out.embedding[s] = s;
        out.starts = p.game->initial_states();
        solve_bounded(p, options, out);
        return out;
    }

    NashProblem target = p;
    std::vector<StateId> embedding(ns);
    for (StateId s = 0; s < ns; ++s) embedding[s] = s;
    if (out.horizon != Horizon::BothInfinite) {
        auto t0 = Clock::now();
        ProductGame prod = mixed_horizon_product(p);
        out.product = prod.game;
        target = prod.problem;
        embedding = std::move(prod.embedding);
        out.mdp_seconds += seconds_since(t0);
    }
    out.solved = target;
    out.embedding = embedding;
    for (StateId s : p.game->initial_states()) out.starts.push_back(embedding[s]);

    out.assumption = check_assumption(target);
    if (!out.assumption.holds && options.strict_assumptions) {
        std::string msg = "assumption violated: ";
        for (std::size_t k = 0; k < out.assumption.messages.size(); ++k)
            msg += (k ? "; " : "") + out.assumption.messages[k];
        fail(ErrorCode::AssumptionViolation, msg);
    }

    NashOptions inner = options;
    inner.trace_states.clear();
    for (StateId s : options.trace_states)
        if (s < ns) inner.trace_states.push_back(embedding[s]);
    NashResult solved;
    if (options.exact) solve_unbounded<Rational>(target, inner, solved);
    else solve_unbounded<double>(target, inner, solved);

    out.exact = solved.exact;
    out.iterations = solved.iterations;
    out.converged = solved.converged;
    out.oscillating = solved.oscillating;
    out.diagnostic = solved.diagnostic;
    out.profile = std::move(solved.profile);
    out.mdp_seconds += solved.mdp_seconds;
    out.csg_seconds += solved.csg_seconds;
    out.local_games = solved.local_games;
    out.values.resize(ns);
    for (StateId s = 0; s < ns; ++s) out.values[s] = solved.values[embedding[s]];
    if (solved.exact) {
        out.exact_values.resize(ns);
        for (StateId s = 0; s < ns; ++s) out.exact_values[s] = solved.exact_values[embedding[s]];
    }
    // Report traces against input states.
    for (auto& e : solved.trace)
        for (StateId s : options.trace_states)
            if (s < ns && embedding[s] == e.state) out.trace.push_back({e.iteration, s, e.v1, e.v2});
    return out;
}

}  // namespace csgnash
