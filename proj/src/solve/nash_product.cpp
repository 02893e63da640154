#include <deque>
#include <map>

#include "csgnash/error.hpp"
#include "csgnash/nash_engine.hpp"

namespace csgnash {

// Layered product for a pair whose objective `f` is finite and the other
// infinite. Layer semantics per finite kind:
//   Next:         layers 0..2, 0 -> 1 -> 2 -> 2; target at layer 1 only.
//   BoundedUntil: layers 0..k+1, i -> i+1 up to k+1 which is absorbing;
//                 remain on layers < k, target on layers <= k.
//   Instant:      layers 0..k+1 as above; reward r_S at layer k, target layer k+1.
//   Cumulative:   layers 0..k, i -> i+1 below k, k absorbing; rewards below k,
//                 target layer k.
ProductGame mixed_horizon_product(const NashProblem& p) {
    const Csg& g = *p.game;
    const bool first_finite = p.objectives[0].finite();
    if (first_finite == p.objectives[1].finite())
        fail(ErrorCode::InvalidArgument, "product construction needs exactly one finite objective");
    const int f = first_finite ? 0 : 1;
    const ObjectiveSpec& fin = p.objectives[f];
    const ObjectiveSpec& inf = p.objectives[1 - f];
    const std::size_t k = fin.horizon();

    std::size_t top = 0;  // last layer, absorbing
    switch (fin.kind) {
        case ObjectiveKind::Next: top = 2; break;
        case ObjectiveKind::BoundedUntil:
        case ObjectiveKind::Instant: top = k + 1; break;
        case ObjectiveKind::Cumulative: top = k; break;
        default: fail(ErrorCode::Internal, "unexpected finite objective kind");
    }
    auto next_layer = [top](std::size_t i) { return i < top ? i + 1 : top; };

    // Reachable (s, i) from every (s, 0).
    const std::size_t ns = g.num_states();
    std::map<std::pair<StateId, std::size_t>, StateId> index;
    std::vector<std::pair<StateId, std::size_t>> states;
    std::deque<StateId> queue;
    auto visit = [&](StateId s, std::size_t i) {
        auto [it, inserted] = index.emplace(std::make_pair(s, i), static_cast<StateId>(states.size()));
        if (inserted) {
            states.push_back({s, i});
            queue.push_back(it->second);
        }
        return it->second;
    };
    for (StateId s = 0; s < ns; ++s) visit(s, 0);
    while (!queue.empty()) {
        auto [s, i] = states[queue.front()];
        queue.pop_front();
        std::size_t j = next_layer(i);
        for (std::size_t r = g.row_begin(s); r < g.row_end(s); ++r)
            for (std::size_t t = g.trans_begin(r); t < g.trans_end(r); ++t) visit(g.succ(t), j);
    }

    CsgBuilder b;
    for (PlayerId pl = 0; pl < g.num_players(); ++pl) b.add_player(g.player_name(pl));
    for (std::size_t a = 0; a < g.num_actions(); ++a)
        b.add_action(g.action_owner(static_cast<ActionId>(a)), g.action_name(static_cast<ActionId>(a)));
    if (!g.exact()) b.mark_inexact();
    auto vars = g.variables();
    vars.push_back(VariableInfo{"_layer", 0, static_cast<std::int32_t>(top), false});
    b.set_variables(vars);
    for (std::size_t q = 0; q < states.size(); ++q) {
        StateId id = b.add_state();
        auto [s, i] = states[q];
        auto val = g.valuation(s);
        std::vector<std::int32_t> v(val.begin(), val.end());
        v.push_back(static_cast<std::int32_t>(i));
        b.set_valuation(id, std::move(v));
        if (!g.state_names().empty() && !g.state_names()[s].empty())
            b.set_state_name(id, g.state_names()[s] + "@" + std::to_string(i));
        if (i == 0) b.set_initial(id);
    }

    const std::size_t nr = g.rewards().size();
    std::vector<std::size_t> reward_ids;
    for (std::size_t r = 0; r < nr; ++r) reward_ids.push_back(b.add_reward(g.rewards()[r].name));
    std::size_t layered = 0;
    if (fin.is_reward()) layered = b.add_reward("_layered");
    const RewardStructure* fin_reward = fin.is_reward() ? &g.rewards().at(fin.reward) : nullptr;

    for (std::size_t q = 0; q < states.size(); ++q) {
        auto [s, i] = states[q];
        const std::size_t j = next_layer(i);
        for (std::size_t r = 0; r < nr; ++r) b.set_state_reward(reward_ids[r], q, g.rewards()[r].state[s]);
        for (std::size_t row = g.row_begin(s); row < g.row_end(s); ++row) {
            auto joint = g.joint_action(row);
            std::vector<std::pair<StateId, Rational>> dist;
            for (std::size_t t = g.trans_begin(row); t < g.trans_end(row); ++t)
                dist.push_back({index.at({g.succ(t), j}), g.exact_prob(t)});
            std::size_t h = b.add_row(q, std::vector<ActionId>(joint.begin(), joint.end()), std::move(dist));
            for (std::size_t r = 0; r < nr; ++r) b.set_action_reward(reward_ids[r], h, g.rewards()[r].action[row]);
            if (fin.kind == ObjectiveKind::Cumulative && i < k) b.set_action_reward(layered, h, fin_reward->action[row]);
        }
        if (fin.kind == ObjectiveKind::Instant && i == k) b.set_state_reward(layered, q, fin_reward->state[s]);
        if (fin.kind == ObjectiveKind::Cumulative && i < k) b.set_state_reward(layered, q, fin_reward->state[s]);
    }

    ProductGame out;
    out.game = std::make_shared<Csg>(b.finish(false));
    const Csg& pg = *out.game;
    const std::size_t np = pg.num_states();
    if (np != states.size()) fail(ErrorCode::Internal, "product state count changed");
    out.embedding.resize(ns);
    for (StateId s = 0; s < ns; ++s) out.embedding[s] = index.at({s, 0});
    for (auto [s, i] : states) {
        out.base_state.push_back(s);
        out.layer.push_back(i);
    }

    ObjectiveSpec nf;
    nf.remain.assign(np, false);
    nf.target.assign(np, false);
    for (StateId q = 0; q < np; ++q) {
        auto [s, i] = states[q];
        switch (fin.kind) {
            case ObjectiveKind::Next:
                nf.kind = ObjectiveKind::Until;
                nf.remain[q] = i == 0;
                nf.target[q] = i == 1 && fin.target[s];
                break;
            case ObjectiveKind::BoundedUntil:
                nf.kind = ObjectiveKind::Until;
                nf.remain[q] = i + 1 <= k && fin.remain[s];
                nf.target[q] = i <= k && fin.target[s];
                break;
            case ObjectiveKind::Instant:
                nf.kind = ObjectiveKind::ReachReward;
                nf.reward = layered;
                nf.target[q] = i == k + 1;
                break;
            case ObjectiveKind::Cumulative:
                nf.kind = ObjectiveKind::ReachReward;
                nf.reward = layered;
                nf.target[q] = i == k;
                break;
            default:
                break;
        }
    }
    ObjectiveSpec ni = inf;
    if (!inf.remain.empty()) ni.remain.assign(np, false);
    if (!inf.target.empty()) ni.target.assign(np, false);
    for (StateId q = 0; q < np; ++q) {
        StateId s = states[q].first;
        if (!inf.remain.empty()) ni.remain[q] = inf.remain[s];
        if (!inf.target.empty()) ni.target[q] = inf.target[s];
    }
    if (inf.is_reward()) ni.reward = reward_ids[inf.reward];

    out.problem.game = out.game.get();
    out.problem.coalition = p.coalition;
    out.problem.objectives[f] = std::move(nf);
    out.problem.objectives[1 - f] = std::move(ni);
    return out;
}

}  // namespace csgnash
