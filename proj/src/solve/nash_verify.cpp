#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <tuple>

#include "json.hpp"

#include "csgnash/error.hpp"
#include "csgnash/mdp_engine.hpp"
#include "csgnash/nash_engine.hpp"

namespace csgnash {

namespace {

using Key = std::tuple<StateId, Mode, std::size_t>;

struct Explored {
    InducedMdp induced;
    // Per induced state: the free side's own profile distribution.
    std::vector<std::vector<Rational>> own;
};

Explored explore(const NashProblem& p, const StrategyProfile& prof, int free_side, const std::vector<StateId>& starts) {
    const Csg& g = *p.game;
    CoalitionGame cg(g, p.coalition);
    const std::size_t horizon = prof.memory_horizon();
    auto cap = [&](std::size_t t) { return prof.bounded ? std::min(t, horizon) : std::size_t(0); };

    Explored ex;
    InducedMdp& im = ex.induced;
    std::map<Key, StateId> index;
    std::deque<StateId> queue;
    auto visit = [&](StateId s, Mode m, std::size_t t) {
        auto [it, inserted] = index.emplace(Key{s, m, t}, static_cast<StateId>(im.base_state.size()));
        if (inserted) {
            im.base_state.push_back(s);
            im.mode.push_back(m);
            im.step.push_back(t);
            queue.push_back(it->second);
        }
        return it->second;
    };
    for (StateId s : starts) im.starts.push_back(visit(s, prof.initial_mode(s), 0));

    std::array<const RewardStructure*, 2> rew{nullptr, nullptr};
    for (int l = 0; l < 2; ++l)
        if (p.objectives[l].is_reward()) rew[l] = &g.rewards().at(p.objectives[l].reward);

    Mdp& mdp = im.mdp;
    // States are numbered in discovery order and filled in the same order.
    for (StateId q = 0; q < im.base_state.size(); ++q) {
        const StateId s = im.base_state[q];
        const Mode m = im.mode[q];
        const std::size_t t = im.step[q];
        const std::size_t l = cg.rows(s), w = cg.cols(s);
        LocalEquilibrium dec = prof.decide(cg, s, m, t);
        if (free_side == 0) ex.own.push_back(dec.x);
        else if (free_side == 1) ex.own.push_back(dec.y);
        else ex.own.push_back({Rational(1)});

        for (int r = 0; r < 2; ++r) im.rewards[r].state.push_back(rew[r] ? rew[r]->state[s] : Rational(0));

        const std::size_t choices = free_side == 0 ? l : (free_side == 1 ? w : 1);
        for (std::size_t c = 0; c < choices; ++c) {
            std::map<StateId, Rational> dist;
            std::array<Rational, 2> reward{Rational(0), Rational(0)};
            for (std::size_t i = 0; i < l; ++i) {
                if (free_side == 0 && i != c) continue;
                Rational wi = free_side == 0 ? Rational(1) : dec.x[i];
                if (wi == 0) continue;
                for (std::size_t j = 0; j < w; ++j) {
                    if (free_side == 1 && j != c) continue;
                    Rational wj = free_side == 1 ? Rational(1) : dec.y[j];
                    if (wj == 0) continue;
                    const Rational weight = wi * wj;
                    const std::size_t row = cg.row(s, i, j);
                    for (int r = 0; r < 2; ++r)
                        if (rew[r]) reward[r] += weight * rew[r]->action[row];
                    for (std::size_t tr = g.trans_begin(row); tr < g.trans_end(row); ++tr) {
                        StateId s2 = g.succ(tr);
                        Mode m2 = prof.next_mode(m, s2, t + 1);
                        StateId q2 = visit(s2, m2, cap(t + 1));
                        dist[q2] += weight * g.exact_prob(tr);
                    }
                }
            }
            mdp.add_choice(c);
            for (auto& [q2, pr] : dist) mdp.add_transition(q2, pr);
            for (int r = 0; r < 2; ++r) im.rewards[r].choice.push_back(reward[r]);
        }
        mdp.end_state();
    }
    mdp.num_states = im.base_state.size();
    mdp.initial = im.starts;
    return ex;
}

// Single-choice chain obtained by mixing the choices of each state with `own`.
std::pair<Mdp, MdpRewards> mix(const Mdp& m, const MdpRewards& rewards, const std::vector<std::vector<Rational>>& own) {
    Mdp out;
    MdpRewards rw;
    out.num_states = m.num_states;
    out.initial = m.initial;
    rw.state = rewards.state;
    for (StateId s = 0; s < m.num_states; ++s) {
        std::map<StateId, Rational> dist;
        Rational reward = 0;
        for (std::size_t c = m.choice_begin[s]; c < m.choice_begin[s + 1]; ++c) {
            const Rational& wc = own[s][c - m.choice_begin[s]];
            if (wc == 0) continue;
            reward += wc * rewards.choice[c];
            for (std::size_t t = m.trans_begin[c]; t < m.trans_begin[c + 1]; ++t) dist[m.succ[t]] += wc * m.exact[t];
        }
        out.add_choice(0);
        for (auto& [q, pr] : dist) out.add_transition(q, pr);
        rw.choice.push_back(reward);
        out.end_state();
    }
    return {std::move(out), std::move(rw)};
}

// Value of objective l at every induced state (for its remaining steps);
// NaN where the objective is already resolved.
std::vector<double> objective_values(const InducedMdp& im, const Mdp& m, const MdpRewards& rewards,
                                     const ObjectiveSpec& o, int l) {
    const std::size_t n = m.num_states;
    StateSet remain(n, false), target(n, false);
    for (StateId q = 0; q < n; ++q) {
        StateId s = im.base_state[q];
        if (!o.remain.empty()) remain[q] = o.remain[s];
        if (!o.target.empty()) target[q] = o.target[s];
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> out(n, nan);
    auto pending = [&](StateId q) {
        Mode md = im.mode[q];
        bool done = l == 0 ? (md == Mode::FirstDone || md == Mode::Done) : (md == Mode::SecondDone || md == Mode::Done);
        return !done;
    };
    auto by_step = [&](const std::vector<std::vector<double>>& steps, std::size_t k) {
        for (StateId q = 0; q < n; ++q)
            if (pending(q) && im.step[q] <= k) out[q] = steps[k - im.step[q]][q];
    };
    MdpOptions opt;
    opt.allow_infinite = true;
    switch (o.kind) {
        case ObjectiveKind::Until: {
            auto r = reach_prob<double>(m, remain, target, Optimum::Max, std::nullopt, opt);
            for (StateId q = 0; q < n; ++q)
                if (pending(q)) out[q] = r.values[q];
            break;
        }
        case ObjectiveKind::BoundedUntil:
            by_step(reach_prob<double>(m, remain, target, Optimum::Max, o.bound, opt).step_values, o.bound);
            break;
        case ObjectiveKind::Next: {
            auto r = next_prob<double>(m, target, Optimum::Max);
            for (StateId q = 0; q < n; ++q)
                if (pending(q) && im.step[q] == 0) out[q] = r.values[q];
            break;
        }
        case ObjectiveKind::Instant:
        case ObjectiveKind::Cumulative: {
            RewardObjective ro;
            ro.kind = o.kind == ObjectiveKind::Instant ? RewardKind::Instant : RewardKind::Cumulative;
            ro.bound = o.bound;
            by_step(expected_reward<double>(m, rewards, ro, Optimum::Max, opt).step_values, o.bound);
            break;
        }
        case ObjectiveKind::ReachReward: {
            RewardObjective ro;
            ro.kind = RewardKind::Reach;
            ro.target = target;
            auto r = expected_reward<double>(m, rewards, ro, Optimum::Max, opt);
            for (StateId q = 0; q < n; ++q)
                if (pending(q)) out[q] = r.infinite[q] ? std::numeric_limits<double>::infinity() : r.values[q];
            break;
        }
    }
    return out;
}

double difference(double best, double achieved) {
    if (std::isnan(best) || std::isnan(achieved)) return 0.0;
    if (std::isinf(best)) return std::isinf(achieved) ? 0.0 : best;
    return best - achieved;
}

}  // namespace

InducedMdp induce_mdp(const NashProblem& p, const StrategyProfile& profile, int free_side,
                      const std::vector<StateId>& starts) {
    if (free_side < -1 || free_side > 1) fail(ErrorCode::InvalidArgument, "free side must be 0, 1 or -1");
    return explore(p, profile, free_side, starts).induced;
}

VerifyReport verify_epsilon_ne(const NashProblem& p, const StrategyProfile& profile, double epsilon,
                               const std::vector<StateId>& starts) {
    if (starts.empty()) fail(ErrorCode::InvalidArgument, "no start states to verify");
    VerifyReport rep;
    for (int l = 0; l < 2; ++l) {
        Explored ex = explore(p, profile, l, starts);
        const InducedMdp& im = ex.induced;
        auto [chain, chain_rewards] = mix(im.mdp, im.rewards[l], ex.own);
        auto best = objective_values(im, im.mdp, im.rewards[l], p.objectives[l], l);
        auto achieved = objective_values(im, chain, chain_rewards, p.objectives[l], l);
        rep.induced_states += im.mdp.num_states;
        rep.achieved[l] = achieved[im.starts[0]];
        rep.best[l] = best[im.starts[0]];
        rep.gap[l] = 0.0;
        for (StateId q : im.starts) rep.gap[l] = std::max(rep.gap[l], difference(best[q], achieved[q]));
        rep.worst_reachable_gap[l] = 0.0;
        for (StateId q = 0; q < im.mdp.num_states; ++q)
            rep.worst_reachable_gap[l] = std::max(rep.worst_reachable_gap[l], difference(best[q], achieved[q]));
        if (std::isnan(rep.achieved[l])) {
            // Resolved at the start: the value is fixed by the start state.
            rep.achieved[l] = rep.best[l] = 0.0;
        }
    }
    rep.pass = rep.gap[0] <= epsilon && rep.gap[1] <= epsilon;
    return rep;
}

std::string profile_json(const NashProblem& p, const StrategyProfile& profile, const std::string& query,
                         const std::vector<StateId>& starts, const NashResult* result) {
    using nlohmann::json;
    const Csg& g = *p.game;
    CoalitionGame cg(g, p.coalition);
    json doc;
    doc["query"] = query;
    json coalitions = json::array();
    for (int side = 0; side < 2; ++side) {
        json names = json::array();
        for (PlayerId pl : cg.members(side)) names.push_back(g.player_name(pl));
        coalitions.push_back(names);
    }
    doc["coalitions"] = coalitions;
    doc["bounded"] = profile.bounded;
    if (profile.bounded) doc["horizons"] = {profile.horizon[0], profile.horizon[1]};
    doc["modes"] = {mode_name(Mode::BothPending), mode_name(Mode::FirstDone), mode_name(Mode::SecondDone),
                    mode_name(Mode::Done)};

    InducedMdp im = induce_mdp(p, profile, -1, starts);
    json initial = json::array();
    for (std::size_t k = 0; k < starts.size(); ++k) {
        json e;
        e["state"] = g.describe_state(starts[k]);
        e["mode"] = mode_name(im.mode[im.starts[k]]);
        if (result) {
            const auto& vals = result->values;
            for (StateId s = 0; s < result->embedding.size(); ++s)
                if (result->embedding[s] == starts[k]) {
                    e["values"] = {vals[s][0], vals[s][1]};
                    if (!result->exact_values.empty())
                        e["exact"] = {to_string(result->exact_values[s][0]), to_string(result->exact_values[s][1])};
                    break;
                }
        }
        initial.push_back(e);
    }
    doc["initial"] = initial;

    json entries = json::array();
    for (StateId q = 0; q < im.mdp.num_states; ++q) {
        const StateId s = im.base_state[q];
        const Mode m = im.mode[q];
        json e;
        e["state"] = g.describe_state(s);
        e["mode"] = mode_name(m);
        if (profile.bounded) e["step"] = im.step[q];
        LocalEquilibrium dec = profile.decide(cg, s, m, im.step[q]);
        if (m == Mode::BothPending) {
            auto side = [&](int k, const std::vector<Rational>& dist) {
                json arr = json::array();
                for (std::size_t a = 0; a < dist.size(); ++a)
                    if (dist[a] != 0) arr.push_back({{"action", cg.tuple_text(s, k, a)}, {"prob", to_string(dist[a])}});
                return arr;
            };
            e["x"] = side(0, dec.x);
            e["y"] = side(1, dec.y);
        } else {
            std::size_t i = 0, j = 0;
            for (std::size_t a = 0; a < dec.x.size(); ++a)
                if (dec.x[a] == 1) i = a;
            for (std::size_t b = 0; b < dec.y.size(); ++b)
                if (dec.y[b] == 1) j = b;
            e["action"] = g.joint_action_text(cg.row(s, i, j));
        }
        entries.push_back(e);
    }
    doc["entries"] = entries;
    return doc.dump(2);
}

}  // namespace csgnash
