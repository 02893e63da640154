#include "csgnash/evaluator.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "csgnash/error.hpp"
#include "csgnash/mdp_engine.hpp"

namespace csgnash {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Every joint action of the game as one MDP choice.
Mdp full_mdp(const Csg& g) {
    Mdp m;
    m.num_states = g.num_states();
    m.initial = g.initial_states();
    for (StateId s = 0; s < g.num_states(); ++s) {
        for (std::size_t row = g.row_begin(s); row < g.row_end(s); ++row) {
            m.add_choice(row - g.row_begin(s));
            for (std::size_t t = g.trans_begin(row); t < g.trans_end(row); ++t)
                m.add_transition(g.succ(t), g.exact_prob(t));
        }
        m.end_state();
    }
    return m;
}

MdpRewards full_rewards(const RewardStructure& r) { return MdpRewards{r.state, r.action}; }

bool maximising(const Formula& f) {
    if (f.threshold) return f.threshold->cmp == Comparison::Ge || f.threshold->cmp == Comparison::Gt;
    return !f.minimise;
}

}  // namespace

bool threshold_holds(double value, const Threshold& t, double tolerance) {
    const double x = t.value.get_d();
    const double slack = tolerance * std::max(1.0, std::abs(x));
    if (std::abs(value - x) <= slack) return t.cmp == Comparison::Ge || t.cmp == Comparison::Le;
    return compare(value, t.cmp, x);
}

Evaluator::Evaluator(const Csg& game, EvalOptions options) : game_(game), options_(std::move(options)) {}

ObjectiveSpec Evaluator::objective_spec(const Objective& o) {
    ObjectiveSpec spec;
    const std::size_t n = game_.num_states();
    if (!o.is_reward) {
        const PathFormula& p = o.path;
        switch (p.op) {
            case PathOp::Next:
                spec.kind = ObjectiveKind::Next;
                spec.remain.assign(n, true);
                spec.target = sat(*p.right);
                break;
            case PathOp::Until:
                spec.kind = ObjectiveKind::Until;
                spec.remain = p.left ? sat(*p.left) : StateSet(n, true);
                spec.target = sat(*p.right);
                break;
            case PathOp::BoundedUntil:
                spec.kind = ObjectiveKind::BoundedUntil;
                spec.bound = p.bound;
                spec.remain = p.left ? sat(*p.left) : StateSet(n, true);
                spec.target = sat(*p.right);
                break;
        }
        return spec;
    }
    spec.reward = o.reward_index;
    switch (o.rho.op) {
        case RewardOp::Instant:
            spec.kind = ObjectiveKind::Instant;
            spec.bound = o.rho.bound;
            break;
        case RewardOp::Cumulative:
            spec.kind = ObjectiveKind::Cumulative;
            spec.bound = o.rho.bound;
            break;
        case RewardOp::Reach:
            spec.kind = ObjectiveKind::ReachReward;
            spec.target = sat(*o.rho.target);
            break;
    }
    return spec;
}

NashResult Evaluator::run_nash(const Formula& f) {
    NashProblem p;
    p.game = &game_;
    p.coalition = f.coalition;
    p.objectives[0] = objective_spec(f.objective[0]);
    p.objectives[1] = objective_spec(f.objective[1]);
    NashResult r = solve_nash(p, options_.nash);
    if (current_) {
        current_->mdp_seconds += r.mdp_seconds;
        current_->csg_seconds += r.csg_seconds;
        current_->iterations += r.iterations;
        if (!r.converged) {
            current_->converged = false;
            current_->warnings.push_back(r.diagnostic);
        }
        for (const auto& m : r.assumption.messages) current_->warnings.push_back(m);
    }
    return r;
}

StateSet Evaluator::nash_sat(const Formula& f) {
    NashResult r = run_nash(f);
    const std::size_t n = game_.num_states();
    StateSet out(n, false);
    for (StateId s = 0; s < n; ++s) {
        if (r.exact && !r.exact_values.empty())
            out[s] = compare(Rational(r.exact_values[s][0] + r.exact_values[s][1]), f.threshold->cmp, f.threshold->value);
        else
            out[s] = threshold_holds(r.sum(s), *f.threshold, options_.nash.conv_epsilon);
    }
    return out;
}

std::vector<double> Evaluator::zero_sum_values(const Formula& f) {
    const bool full = f.coalition.size() == game_.num_players();
    if (!full && !f.coalition.empty())
        fail(ErrorCode::Unsupported,
             "zero-sum operators are only supported for the empty coalition or the coalition of all players");
    bool max = maximising(f);
    if (f.coalition.empty()) max = !max;
    const Optimum opt = max ? Optimum::Max : Optimum::Min;
    const Objective& o = f.objective[0];

    auto t0 = Clock::now();
    Mdp m = full_mdp(game_);
    MdpOptions mo;
    mo.epsilon = options_.nash.mdp_epsilon;
    std::vector<double> values;
    if (!o.is_reward) {
        const PathFormula& p = o.path;
        const std::size_t n = game_.num_states();
        StateSet target = sat(*p.right);
        if (p.op == PathOp::Next) {
            values = next_prob<double>(m, target, opt).values;
        } else {
            StateSet remain = p.left ? sat(*p.left) : StateSet(n, true);
            std::optional<std::size_t> bound;
            if (p.op == PathOp::BoundedUntil) bound = p.bound;
            values = reach_prob<double>(m, remain, target, opt, bound, mo).values;
        }
    } else {
        RewardObjective ro;
        switch (o.rho.op) {
            case RewardOp::Instant: ro.kind = RewardKind::Instant; break;
            case RewardOp::Cumulative: ro.kind = RewardKind::Cumulative; break;
            case RewardOp::Reach: ro.kind = RewardKind::Reach; break;
        }
        ro.bound = o.rho.bound;
        if (o.rho.target) ro.target = sat(*o.rho.target);
        mo.allow_infinite = true;
        auto r = expected_reward<double>(m, full_rewards(game_.rewards().at(o.reward_index)), ro, opt, mo);
        values = std::move(r.values);
        for (StateId s = 0; s < values.size(); ++s)
            if (!r.infinite.empty() && r.infinite[s]) values[s] = std::numeric_limits<double>::infinity();
    }
    if (current_) current_->mdp_seconds += seconds_since(t0);
    return values;
}

StateSet Evaluator::zero_sum_sat(const Formula& f) {
    std::vector<double> v = zero_sum_values(f);
    StateSet out(v.size(), false);
    for (StateId s = 0; s < v.size(); ++s) out[s] = threshold_holds(v[s], *f.threshold, options_.nash.mdp_epsilon);
    return out;
}

StateSet Evaluator::sat(const Formula& f) {
    const std::size_t n = game_.num_states();
    switch (f.kind) {
        case FormulaKind::True: return StateSet(n, true);
        case FormulaKind::False: return StateSet(n, false);
        case FormulaKind::Label: {
            const StateSet* l = game_.label(f.label);
            if (!l) fail(ErrorCode::UndeclaredSymbol, "unknown label \"" + f.label + "\"");
            return *l;
        }
        case FormulaKind::Expression: {
            StateSet out(n, false);
            for (StateId s = 0; s < n; ++s) out[s] = eval_bool(*f.expr, game_.valuation(s));
            return out;
        }
        case FormulaKind::Not: {
            StateSet a = sat(*f.args.at(0));
            a.flip();
            return a;
        }
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Implies:
        case FormulaKind::Iff: {
            StateSet a = sat(*f.args.at(0));
            StateSet b = sat(*f.args.at(1));
            for (StateId s = 0; s < n; ++s) {
                switch (f.kind) {
                    case FormulaKind::And: a[s] = a[s] && b[s]; break;
                    case FormulaKind::Or: a[s] = a[s] || b[s]; break;
                    case FormulaKind::Implies: a[s] = !a[s] || b[s]; break;
                    default: a[s] = a[s] == b[s]; break;
                }
            }
            return a;
        }
        case FormulaKind::Prob:
        case FormulaKind::Reward:
            if (!f.threshold) fail(ErrorCode::Type, "a numerical query cannot be used as a state formula");
            return zero_sum_sat(f);
        case FormulaKind::Nash:
            if (!f.threshold) fail(ErrorCode::Type, "a numerical query cannot be used as a state formula");
            return nash_sat(f);
    }
    fail(ErrorCode::Internal, "unhandled formula kind");
}

PropertyResult Evaluator::evaluate(const Formula& f) {
    PropertyResult out;
    out.kind = f.kind;
    current_ = &out;
    struct Reset {
        PropertyResult*& p;
        ~Reset() { p = nullptr; }
    } reset{current_};

    const auto& init = game_.initial_states();
    if (init.empty()) fail(ErrorCode::InvalidArgument, "game has no initial state");
    const StateId s0 = init.front();

    if (f.kind == FormulaKind::Nash) {
        NashResult r = run_nash(f);
        out.numerical = !f.threshold;
        out.pair = r.values[s0];
        out.sum = r.sum(s0);
        if (r.exact && !r.exact_values.empty()) out.exact_pair = r.exact_values[s0];
        out.sat.assign(game_.num_states(), false);
        for (StateId s = 0; s < game_.num_states(); ++s) {
            if (f.threshold) {
                if (out.exact_pair)
                    out.sat[s] = compare(Rational(r.exact_values[s][0] + r.exact_values[s][1]), f.threshold->cmp,
                                         f.threshold->value);
                else
                    out.sat[s] = threshold_holds(r.sum(s), *f.threshold, options_.nash.conv_epsilon);
            }
        }
        if (options_.verify && r.profile) {
            auto t0 = Clock::now();
            out.verify = verify_epsilon_ne(r.solved, *r.profile, options_.verify_epsilon, r.starts);
            out.mdp_seconds += seconds_since(t0);
        }
        out.nash = std::move(r);
    } else if ((f.kind == FormulaKind::Prob || f.kind == FormulaKind::Reward) && !f.threshold) {
        out.numerical = true;
        std::vector<double> v = zero_sum_values(f);
        out.value = v[s0];
        out.sat.assign(game_.num_states(), false);
    } else {
        out.sat = sat(f);
    }
    out.holds = !out.numerical;
    if (!out.numerical)
        for (StateId s : init) out.holds = out.holds && out.sat[s];
    return out;
}

}  // namespace csgnash
