#include <cmath>
#include <random>

#include "doctest.h"

#include "csgnash/coalition.hpp"
#include "csgnash/error.hpp"
#include "csgnash/mdp_engine.hpp"
#include "csgnash/nash_engine.hpp"
#include "oracles/oracles.hpp"
#include "test_util.hpp"

using namespace csgnash;

namespace {

const char* kSentQuery = "<<p1:p2>>max=? (P[F \"sent1\"] + P[F \"sent2\"])";
const char* kFirstQuery = "<<p1:p2>>max=? (P[!\"send2\" U \"send1\"] + P[!\"send1\" U \"send2\"])";

ObjectiveSpec reach(ObjectiveKind kind, const StateSet& target, std::size_t bound = 0) {
    ObjectiveSpec o;
    o.kind = kind;
    o.bound = bound;
    o.remain.assign(target.size(), true);
    o.target = target;
    return o;
}

NashProblem pair_problem(const Csg& g, ObjectiveSpec a, ObjectiveSpec b) {
    NashProblem p;
    p.game = &g;
    p.coalition = {0};
    p.objectives = {std::move(a), std::move(b)};
    return p;
}

// Local index of the action tuple of `side` at s whose first action name starts with `prefix`.
std::size_t tuple_index(const CoalitionGame& cg, StateId s, int side, char prefix) {
    std::size_t count = side == 0 ? cg.rows(s) : cg.cols(s);
    for (std::size_t k = 0; k < count; ++k) {
        auto t = cg.tuple(s, side, k);
        if (t[0] != kIdle && cg.base().action_name(t[0])[0] == prefix) return k;
    }
    return 0;
}

std::vector<Rational> unit_vector(std::size_t n, std::size_t k) {
    std::vector<Rational> v(n, Rational(0));
    v[k] = 1;
    return v;
}

}  // namespace

TEST_SUITE("nash") {

TEST_CASE("figure one: both users eventually send") {
    auto m = testutil::load("medium_access_fig1.csg");
    EvalOptions opt;
    opt.verify = true;
    auto r = testutil::check(m, kSentQuery, opt);
    CHECK(r.pair[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.pair[1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.sum == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(r.converged);
    REQUIRE(r.verify.has_value());
    CHECK(r.verify->pass);
    CHECK(r.verify->gap[0] <= 1e-4);
    CHECK(r.verify->gap[1] <= 1e-4);
    auto oracle_pair = oracle::best_pure_memoryless_ne(
        m.game, {StateSet(6, true), StateSet(6, true)}, {testutil::label(m.game, "sent1"), testutil::label(m.game, "sent2")},
        m.game.initial_states().front());
    REQUIRE(oracle_pair);
    CHECK(r.pair[0] == doctest::Approx((*oracle_pair)[0].get_d()));
    CHECK(r.pair[1] == doctest::Approx((*oracle_pair)[1].get_d()));
}

TEST_CASE("figure one: being first to send") {
    for (const char* q2 : {"0.25", "0.5", "0.75", "0.9"}) {
        CAPTURE(q2);
        auto m = testutil::load("medium_access_fig1.csg", {{"q2", q2}});
        auto r = testutil::check(m, kFirstQuery);
        const Csg& g = m.game;
        auto s1 = testutil::label(g, "send1"), s2 = testutil::label(g, "send2");
        StateSet not1(g.num_states()), not2(g.num_states());
        for (StateId s = 0; s < g.num_states(); ++s) {
            not1[s] = !s1[s];
            not2[s] = !s2[s];
        }
        auto want = oracle::best_pure_memoryless_ne(g, {not2, not1}, {s1, s2}, g.initial_states().front());
        REQUIRE(want);
        CHECK(r.pair[0] == doctest::Approx((*want)[0].get_d()).epsilon(1e-6));
        CHECK(r.pair[1] == doctest::Approx((*want)[1].get_d()).epsilon(1e-6));
    }
    auto m = testutil::load("medium_access_fig1.csg");
    auto r = testutil::check(m, kFirstQuery);
    CHECK(r.pair[0] == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(r.pair[1] == doctest::Approx(0.75).epsilon(1e-6));
}

TEST_CASE("figure one: next-step objectives") {
    auto m = testutil::load("medium_access_fig1.csg");
    auto both = testutil::check(m, "<<p1:p2>>max=? (P[X \"sent1\"] + P[X \"sent2\"])");
    REQUIRE(both.exact_pair.has_value());
    CHECK((*both.exact_pair)[0] == Rational(3, 4));
    CHECK((*both.exact_pair)[1] == Rational(3, 4));
    // One finite and one infinite objective go through the product game.
    auto mixed = testutil::check(m, "<<p1:p2>>max=? (P[X \"sent1\"] + P[F \"sent2\"])");
    CHECK(mixed.pair[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mixed.pair[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("figure one: thresholds") {
    auto m = testutil::load("medium_access_fig1.csg");
    CHECK(testutil::check(m, "<<p1:p2>> >=2 (P[F \"sent1\"] + P[F \"sent2\"])").holds);
    CHECK(testutil::check(m, "<<p1:p2>> <=2 (P[F \"sent1\"] + P[F \"sent2\"])").holds);
    CHECK_FALSE(testutil::check(m, "<<p1:p2>> >2 (P[F \"sent1\"] + P[F \"sent2\"])").holds);
    CHECK(testutil::check(m, "!(<<p1:p2>> <1.5 (P[F \"sent1\"] + P[F \"sent2\"]))").holds);
}

TEST_CASE("unsatisfiable targets give zero") {
    auto m = testutil::load("medium_access_fig1.csg");
    auto r = testutil::check(m, "<<p1:p2>>max=? (P[F false] + P[F false])");
    CHECK(r.pair[0] == 0.0);
    CHECK(r.pair[1] == 0.0);
    auto b = testutil::check(m, "<<p1:p2>>max=? (P[F<=4 false] + P[F<=4 false])");
    CHECK(b.pair[0] == 0.0);
    CHECK(b.pair[1] == 0.0);
}

TEST_CASE("bounded values agree with backward induction") {
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 60; ++trial) {
        CAPTURE(trial);
        Csg g = testutil::random_game(rng, 3 + trial % 4, trial % 3 == 0 ? 3 : 2);
        std::size_t k = static_cast<std::size_t>(trial % 5);
        auto t1 = testutil::label(g, "t1"), t2 = testutil::label(g, "t2");
        auto want = oracle::bounded_nash(g, t1, t2, k);
        auto res = solve_nash(pair_problem(g, reach(ObjectiveKind::BoundedUntil, t1, k),
                                           reach(ObjectiveKind::BoundedUntil, t2, k)));
        REQUIRE(res.exact);
        for (StateId s = 0; s < g.num_states(); ++s) {
            CAPTURE(s);
            CHECK(res.exact_values[s][0] == want[s][0]);
            CHECK(res.exact_values[s][1] == want[s][1]);
        }
    }
}

TEST_CASE("bounded and unbounded values coincide on acyclic games") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        CAPTURE(trial);
        const std::size_t n = 3 + trial % 4;
        Csg g = testutil::random_game(rng, n, 2, true);
        auto t1 = testutil::label(g, "t1"), t2 = testutil::label(g, "t2");
        auto bounded = solve_nash(pair_problem(g, reach(ObjectiveKind::BoundedUntil, t1, n),
                                               reach(ObjectiveKind::BoundedUntil, t2, n)));
        NashOptions exact;
        exact.exact = true;
        auto unbounded = solve_nash(pair_problem(g, reach(ObjectiveKind::Until, t1), reach(ObjectiveKind::Until, t2)), exact);
        CHECK(unbounded.converged);
        for (StateId s = 0; s < n; ++s) {
            CHECK(unbounded.exact_values[s][0] == bounded.exact_values[s][0]);
            CHECK(unbounded.exact_values[s][1] == bounded.exact_values[s][1]);
        }
        // One bounded and one unbounded objective: the product must agree too.
        auto mixed = solve_nash(pair_problem(g, reach(ObjectiveKind::BoundedUntil, t1, n), reach(ObjectiveKind::Until, t2)));
        for (StateId s = 0; s < n; ++s) {
            CHECK(mixed.values[s][0] == doctest::Approx(bounded.values[s][0]).epsilon(1e-6));
            CHECK(mixed.values[s][1] == doctest::Approx(bounded.values[s][1]).epsilon(1e-6));
        }
    }
}

TEST_CASE("states satisfying one target use the cooperative optimum for the other") {
    std::mt19937 rng(88);
    for (int trial = 0; trial < 40; ++trial) {
        Csg g = testutil::random_game(rng, 5, 2);
        auto t1 = testutil::label(g, "t1"), t2 = testutil::label(g, "t2");
        NashOptions opt;
        opt.max_iterations = 200;
        auto res = solve_nash(pair_problem(g, reach(ObjectiveKind::Until, t1), reach(ObjectiveKind::Until, t2)), opt);
        CoalitionGame cg(g, {0});
        Mdp joint = joint_mdp(cg);
        StateSet all(g.num_states(), true);
        auto p1 = oracle::mdp_until(joint, all, t1, true);
        auto p2 = oracle::mdp_until(joint, all, t2, true);
        for (StateId s = 0; s < g.num_states(); ++s) {
            if (t1[s] && t2[s]) {
                CHECK(res.values[s][0] == 1.0);
                CHECK(res.values[s][1] == 1.0);
            } else if (t1[s]) {
                CHECK(res.values[s][0] == 1.0);
                CHECK(res.values[s][1] == doctest::Approx(p2[s].get_d()).epsilon(1e-5));
            } else if (t2[s]) {
                CHECK(res.values[s][0] == doctest::Approx(p1[s].get_d()).epsilon(1e-5));
                CHECK(res.values[s][1] == 1.0);
            }
        }
    }
}

TEST_CASE("cycle fixture oscillates with exact iterates") {
    auto m = testutil::load("fixtures/oscillation_prob.csg");
    NashOptions opt;
    opt.exact = true;
    opt.trace_states = {0};
    opt.trace_limit = 4;
    auto p = pair_problem(m.game, reach(ObjectiveKind::Until, testutil::label(m.game, "a1")),
                          reach(ObjectiveKind::Until, testutil::label(m.game, "a2")));
    auto rep = check_assumption(p);
    CHECK_FALSE(rep.holds);
    REQUIRE(rep.non_terminal.size() == 1);
    CHECK(rep.non_terminal[0].states == std::vector<StateId>{0, 1});
    auto res = solve_nash(p, opt);
    REQUIRE(res.trace.size() == 4);
    const std::array<std::array<Rational, 2>, 4> want{{{Rational(1, 4), Rational(3, 4)},
                                                       {Rational(3, 4), Rational(1, 4)},
                                                       {Rational(1, 4), Rational(3, 4)},
                                                       {Rational(3, 4), Rational(1, 4)}}};
    for (std::size_t n = 0; n < 4; ++n) {
        CHECK(res.trace[n].iteration == n + 1);
        CHECK(res.trace[n].v1 == want[n][0]);
        CHECK(res.trace[n].v2 == want[n][1]);
    }
    CHECK_FALSE(res.converged);
    CHECK(res.oscillating);
    CHECK(res.diagnostic.find("oscillate") != std::string::npos);

    opt.strict_assumptions = true;
    CHECK_THROWS_AS(solve_nash(p, opt), Error);
}

TEST_CASE("reward fixture alternates and never converges") {
    auto m = testutil::load("fixtures/oscillation_reward.csg");
    NashOptions opt;
    opt.exact = true;
    opt.trace_states = {0};
    opt.trace_limit = 4;
    const StateSet a = testutil::label(m.game, "a");
    ObjectiveSpec o1 = reach(ObjectiveKind::ReachReward, a), o2 = reach(ObjectiveKind::ReachReward, a);
    o1.reward = *m.game.find_reward("r1");
    o2.reward = *m.game.find_reward("r2");
    auto p = pair_problem(m.game, o1, o2);
    auto rep = check_assumption(p);
    CHECK_FALSE(rep.holds);
    CHECK(rep.not_almost_sure[0] == std::vector<StateId>{0, 1});
    auto res = solve_nash(p, opt);
    REQUIRE(res.trace.size() == 4);
    for (std::size_t n = 0; n < 4; ++n) {
        bool odd = n % 2 == 0;
        CHECK(res.trace[n].v1 == (odd ? Rational(1, 3) : Rational(2)));
        CHECK(res.trace[n].v2 == (odd ? Rational(1) : Rational(1, 3)));
    }
    CHECK_FALSE(res.converged);
}

TEST_CASE("always waiting is not an equilibrium") {
    auto m = testutil::load("medium_access_fig1.csg");
    auto r = testutil::check(m, kSentQuery);
    REQUIRE(r.nash.has_value());
    REQUIRE(r.nash->profile.has_value());
    StrategyProfile wait = *r.nash->profile;
    const NashProblem& p = r.nash->solved;
    CoalitionGame cg(*p.game, p.coalition);
    for (StateId s = 0; s < cg.num_states(); ++s) {
        if (wait.equilibrium[0][s].x.empty()) continue;
        wait.equilibrium[0][s].x = unit_vector(cg.rows(s), tuple_index(cg, s, 0, 'w'));
        wait.equilibrium[0][s].y = unit_vector(cg.cols(s), tuple_index(cg, s, 1, 'w'));
    }
    auto bad = verify_epsilon_ne(p, wait, 1e-4, r.nash->starts);
    CHECK(bad.gap[0] == doctest::Approx(1.0));
    CHECK(bad.gap[1] == doctest::Approx(1.0));
    CHECK_FALSE(bad.pass);
    CHECK(verify_epsilon_ne(p, wait, 1.0, r.nash->starts).pass);

    auto good = verify_epsilon_ne(p, *r.nash->profile, 1e-4, r.nash->starts);
    CHECK(good.pass);
    CHECK(good.worst_reachable_gap[0] <= 1e-4);
    CHECK(good.worst_reachable_gap[1] <= 1e-4);
}

TEST_CASE("induced MDP of a fixed user") {
    auto m = testutil::load("medium_access_fig1.csg");
    auto r = testutil::check(m, kSentQuery);
    const NashProblem& p = r.nash->solved;
    const Csg& g = *p.game;
    auto induced = induce_mdp(p, *r.nash->profile, 1, r.nash->starts);
    for (std::size_t c = 0; c < induced.mdp.num_choices(); ++c) {
        Rational sum = 0;
        for (std::size_t t = induced.mdp.trans_begin[c]; t < induced.mdp.trans_begin[c + 1]; ++t)
            sum += induced.mdp.exact[t];
        CHECK(sum == 1);
    }
    // Against the synthesised first user the second still sends for sure.
    StateSet sent2(induced.mdp.num_states, false);
    const StateSet& base = testutil::label(g, "sent2");
    for (StateId q = 0; q < induced.mdp.num_states; ++q) sent2[q] = base[induced.base_state[q]];
    StateSet all(induced.mdp.num_states, true);
    auto best = reach_prob<double>(induced.mdp, all, sent2, Optimum::Max);
    CHECK(best.values[induced.starts[0]] == doctest::Approx(1.0));

    // Fixing the first user to always transmit: the second's transmit choice
    // reaches joint success with probability q2.
    StrategyProfile always = *r.nash->profile;
    CoalitionGame cg(g, p.coalition);
    StateId init = g.initial_states().front();
    always.equilibrium[0][init].x = unit_vector(cg.rows(init), tuple_index(cg, init, 0, 't'));
    auto fixed = induce_mdp(p, always, 1, {init});
    StateId q0 = fixed.starts[0];
    std::size_t t2 = tuple_index(cg, init, 1, 't');
    bool found = false;
    for (std::size_t c = fixed.mdp.choice_begin[q0]; c < fixed.mdp.choice_begin[q0 + 1]; ++c) {
        if (fixed.mdp.origin[c] != t2) continue;
        for (std::size_t t = fixed.mdp.trans_begin[c]; t < fixed.mdp.trans_begin[c + 1]; ++t) {
            StateId b = fixed.base_state[fixed.mdp.succ[t]];
            if (testutil::label(g, "sent1")[b] && testutil::label(g, "sent2")[b]) {
                CHECK(fixed.mdp.exact[t] == Rational(3, 4));
                found = true;
            }
        }
    }
    CHECK(found);
}

TEST_CASE("profile export is JSON with the query") {
    auto m = testutil::load("medium_access_fig1.csg");
    auto r = testutil::check(m, kSentQuery);
    std::string json = profile_json(r.nash->solved, *r.nash->profile, kSentQuery, r.nash->starts, &*r.nash);
    CHECK(json.find("\"query\"") != std::string::npos);
    CHECK(json.find("sent1") != std::string::npos);
}

TEST_CASE("robot coordination reaches both goals") {
    auto m = testutil::load("robot_coordination.csg");
    EvalOptions opt;
    opt.verify = true;
    auto r = testutil::check(m, "<<p1:p2>>max=? (P[F \"goal1\"] + P[F \"goal2\"])", opt);
    CHECK(r.sum == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(r.converged);
    REQUIRE(r.verify.has_value());
    CHECK(r.verify->pass);
}

TEST_CASE("reward pairs on power control are finite and verified") {
    auto m = testutil::load("power_control.csg", {{"emax", "6"}});
    EvalOptions opt;
    opt.verify = true;
    auto r = testutil::check(m, "<<p1:p2>>max=? (R{\"r1\"}[C<=4] + R{\"r2\"}[C<=4])", opt);
    CHECK(r.sum > 0.0);
    REQUIRE(r.verify.has_value());
    CHECK(r.verify->pass);
}

}
