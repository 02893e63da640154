#include "csgnash/mdp.hpp"

namespace csgnash {

void Mdp::add_choice(std::size_t origin_tag) {
    trans_begin.push_back(succ.size());
    origin.push_back(origin_tag);
}

void Mdp::add_transition(StateId target, double pr) {
    succ.push_back(target);
    prob.push_back(pr);
    trans_begin.back() = succ.size();
}

void Mdp::add_transition(StateId target, const Rational& pr) {
    succ.push_back(target);
    prob.push_back(pr.get_d());
    exact.push_back(pr);
    trans_begin.back() = succ.size();
}

Mdp joint_mdp(const CoalitionGame& cg) {
    const Csg& g = cg.base();
    Mdp mdp;
    mdp.num_states = g.num_states();
    mdp.initial = g.initial_states();
    mdp.succ.reserve(g.num_transitions());
    mdp.prob.reserve(g.num_transitions());
    if (g.exact()) mdp.exact.reserve(g.num_transitions());
    for (StateId s = 0; s < g.num_states(); ++s) {
        const std::size_t l = cg.rows(s), m = cg.cols(s);
        for (std::size_t i = 0; i < l; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                std::size_t row = cg.row(s, i, j);
                mdp.add_choice(i * m + j);
                for (std::size_t t = g.trans_begin(row); t < g.trans_end(row); ++t) {
                    if (g.exact()) mdp.add_transition(g.succ(t), g.exact_prob(t));
                    else mdp.add_transition(g.succ(t), g.prob(t));
                }
            }
        mdp.end_state();
    }
    return mdp;
}

MdpRewards joint_rewards(const CoalitionGame& cg, const RewardStructure& r) {
    const Csg& g = cg.base();
    MdpRewards out;
    out.state = r.state;
    out.choice.reserve(g.num_rows());
    for (StateId s = 0; s < g.num_states(); ++s)
        for (std::size_t i = 0; i < cg.rows(s); ++i)
            for (std::size_t j = 0; j < cg.cols(s); ++j) out.choice.push_back(r.action[cg.row(s, i, j)]);
    return out;
}

}  // namespace csgnash
