#include <cmath>
#include <random>

#include "doctest.h"

#include "csgnash/error.hpp"
#include "csgnash/mdp.hpp"
#include "csgnash/mdp_engine.hpp"
#include "oracles/oracles.hpp"

using namespace csgnash;

namespace {

struct RandomMdp {
    Mdp mdp;
    MdpRewards rewards;
    StateSet target;
    StateSet remain;
};

RandomMdp random_mdp(std::mt19937& rng, std::size_t n) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    RandomMdp r;
    r.mdp.num_states = n;
    r.mdp.initial = {0};
    for (StateId s = 0; s < n; ++s) {
        int choices = pick(1, 3);
        for (int c = 0; c < choices; ++c) {
            r.mdp.add_choice(static_cast<std::size_t>(c));
            std::map<StateId, Rational> dist;
            int parts = pick(1, 3);
            std::vector<int> thirds(parts, 1);
            for (int q = parts; q < 3; ++q) ++thirds[pick(0, parts - 1)];
            for (int q = 0; q < parts; ++q) dist[static_cast<StateId>(pick(0, static_cast<int>(n) - 1))] += Rational(thirds[q]) / 3;
            for (const auto& [t, p] : dist) r.mdp.add_transition(t, p);
            r.rewards.choice.push_back(pick(0, 2));
        }
        r.mdp.end_state();
        r.rewards.state.push_back(pick(0, 1));
    }
    r.target.assign(n, false);
    r.remain.assign(n, true);
    for (StateId s = 0; s < n; ++s) {
        r.target[s] = pick(0, 3) == 0;
        r.remain[s] = pick(0, 4) != 0;
    }
    return r;
}

}  // namespace

TEST_SUITE("mdp") {

TEST_CASE("unbounded until agrees with strategy enumeration") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 120; ++trial) {
        CAPTURE(trial);
        auto r = random_mdp(rng, 2 + trial % 4);
        for (bool maximise : {true, false}) {
            auto want = oracle::mdp_until(r.mdp, r.remain, r.target, maximise);
            auto got = reach_prob<double>(r.mdp, r.remain, r.target, maximise ? Optimum::Max : Optimum::Min);
            REQUIRE(got.converged);
            for (StateId s = 0; s < r.mdp.num_states; ++s) CHECK(got.values[s] == doctest::Approx(want[s].get_d()).epsilon(1e-5));
        }
    }
}

TEST_CASE("qualitative sets match the exact values") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 80; ++trial) {
        auto r = random_mdp(rng, 2 + trial % 4);
        auto mx = oracle::mdp_until(r.mdp, r.remain, r.target, true);
        auto mn = oracle::mdp_until(r.mdp, r.remain, r.target, false);
        auto p0max = prob0_max(r.mdp, r.remain, r.target);
        auto p0min = prob0_min(r.mdp, r.remain, r.target);
        auto p1max = prob1_max(r.mdp, r.remain, r.target);
        auto p1min = prob1_min(r.mdp, r.remain, r.target);
        for (StateId s = 0; s < r.mdp.num_states; ++s) {
            CHECK(p0max[s] == (mx[s] == 0));
            CHECK(p0min[s] == (mn[s] == 0));
            CHECK(p1max[s] == (mx[s] == 1));
            CHECK(p1min[s] == (mn[s] == 1));
        }
    }
}

TEST_CASE("minimum reachability is one minus the best avoidance") {
    std::mt19937 rng(47);
    for (int trial = 0; trial < 60; ++trial) {
        auto r = random_mdp(rng, 2 + trial % 4);
        StateSet all(r.mdp.num_states, true);
        // Avoiding the target forever, maximised over memoryless strategies.
        std::vector<Rational> avoid(r.mdp.num_states, Rational(0));
        oracle::for_each_strategy(r.mdp, [&](const std::vector<std::size_t>& pick) {
            auto p = oracle::chain_until(r.mdp, pick, all, r.target);
            for (StateId s = 0; s < r.mdp.num_states; ++s) avoid[s] = std::max(avoid[s], Rational(1 - p[s]));
        });
        auto got = reach_prob<double>(r.mdp, all, r.target, Optimum::Min);
        for (StateId s = 0; s < r.mdp.num_states; ++s)
            CHECK(got.values[s] == doctest::Approx(1 - avoid[s].get_d()).epsilon(1e-5));
    }
}

TEST_CASE("bounded until is exact") {
    std::mt19937 rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        auto r = random_mdp(rng, 2 + trial % 5);
        std::size_t k = static_cast<std::size_t>(trial % 6);
        for (bool maximise : {true, false}) {
            auto want = oracle::mdp_bounded_until(r.mdp, r.remain, r.target, k, maximise);
            auto got = reach_prob<Rational>(r.mdp, r.remain, r.target, maximise ? Optimum::Max : Optimum::Min, k);
            CHECK(got.values == want);
        }
    }
}

TEST_CASE("next is a one-step expectation") {
    std::mt19937 rng(59);
    for (int trial = 0; trial < 40; ++trial) {
        auto r = random_mdp(rng, 4);
        auto got = next_prob<Rational>(r.mdp, r.target, Optimum::Max);
        for (StateId s = 0; s < r.mdp.num_states; ++s) {
            Rational best = 0;
            for (std::size_t c = r.mdp.choice_begin[s]; c < r.mdp.choice_begin[s + 1]; ++c) {
                Rational q = 0;
                for (std::size_t t = r.mdp.trans_begin[c]; t < r.mdp.trans_begin[c + 1]; ++t)
                    if (r.target[r.mdp.succ[t]]) q += r.mdp.exact[t];
                best = std::max(best, q);
            }
            CHECK(got.values[s] == best);
        }
    }
}

TEST_CASE("cumulative rewards are exact") {
    std::mt19937 rng(61);
    for (int trial = 0; trial < 60; ++trial) {
        auto r = random_mdp(rng, 2 + trial % 4);
        std::size_t k = static_cast<std::size_t>(trial % 5);
        for (bool maximise : {true, false}) {
            RewardObjective obj{RewardKind::Cumulative, k, {}};
            auto got = expected_reward<Rational>(r.mdp, r.rewards, obj, maximise ? Optimum::Max : Optimum::Min);
            CHECK(got.values == oracle::mdp_cumulative(r.mdp, r.rewards, k, maximise));
        }
    }
}

TEST_CASE("reachability rewards agree with strategy enumeration") {
    std::mt19937 rng(67);
    for (int trial = 0; trial < 120; ++trial) {
        CAPTURE(trial);
        auto r = random_mdp(rng, 2 + trial % 4);
        for (bool maximise : {true, false}) {
            CAPTURE(maximise);
            auto want = oracle::mdp_reach_reward(r.mdp, r.rewards, r.target, maximise);
            MdpOptions opt;
            opt.allow_infinite = true;
            RewardObjective obj{RewardKind::Reach, 0, r.target};
            auto got = expected_reward<double>(r.mdp, r.rewards, obj, maximise ? Optimum::Max : Optimum::Min, opt);
            for (StateId s = 0; s < r.mdp.num_states; ++s) {
                CAPTURE(s);
                CHECK(bool(got.infinite[s]) == !want[s].has_value());
                if (want[s]) CHECK(got.values[s] == doctest::Approx(want[s]->get_d()).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("infinite expected reward is reported") {
    Mdp m;
    m.num_states = 2;
    m.add_choice(0);
    m.add_transition(0, Rational(1));
    m.add_choice(1);
    m.add_transition(1, Rational(1));
    m.end_state();
    m.add_choice(0);
    m.add_transition(1, Rational(1));
    m.end_state();
    MdpRewards r{{1, 0}, {0, 0, 0}};
    RewardObjective obj{RewardKind::Reach, 0, {false, true}};
    CHECK_THROWS_AS(expected_reward<double>(m, r, obj, Optimum::Max), Error);
    auto mn = expected_reward<double>(m, r, obj, Optimum::Min);
    CHECK(mn.values[0] == doctest::Approx(1.0));
}

TEST_CASE("converged values satisfy the Bellman equation") {
    std::mt19937 rng(71);
    for (int trial = 0; trial < 50; ++trial) {
        auto r = random_mdp(rng, 5);
        auto got = reach_prob<double>(r.mdp, r.remain, r.target, Optimum::Max);
        for (StateId s = 0; s < r.mdp.num_states; ++s) {
            if (r.target[s] || !r.remain[s]) continue;
            double best = 0.0;
            for (std::size_t c = r.mdp.choice_begin[s]; c < r.mdp.choice_begin[s + 1]; ++c) {
                double q = 0.0;
                for (std::size_t t = r.mdp.trans_begin[c]; t < r.mdp.trans_begin[c + 1]; ++t)
                    q += r.mdp.prob[t] * got.values[r.mdp.succ[t]];
                best = std::max(best, q);
            }
            CHECK(std::abs(best - got.values[s]) < 1e-5);
        }
    }
}

}
