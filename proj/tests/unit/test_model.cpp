#include <random>
#include <string>

#include "doctest.h"

#include "csgnash/coalition.hpp"
#include "csgnash/end_components.hpp"
#include "csgnash/error.hpp"
#include "csgnash/explicit_format.hpp"
#include "csgnash/mdp.hpp"
#include "csgnash/model_language.hpp"
#include "csgnash/nash_engine.hpp"
#include "oracles/oracles.hpp"
#include "test_util.hpp"

using namespace csgnash;

namespace {

ErrorCode build_error(const std::string& text, const std::map<std::string, std::string>& overrides = {}) {
    try {
        load_model_text(text, overrides);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("model was accepted");
    return ErrorCode::Internal;
}

const char* kCounter = R"(csg
player p1 m endplayer
player p2 n endplayer
module m
  x : [0..2] init 0;
  [inc] x<2 -> (x'=x+1);
  [stay] x=2 -> true;
endmodule
module n
  [go] true -> true;
endmodule
)";

// Three players at one decision state; every joint action leads to its own
// sink so continuation values can encode payoffs.
Csg three_player_stag_hunt() {
    CsgBuilder b;
    PlayerId p1 = b.add_player("p1"), p2 = b.add_player("p2"), p3 = b.add_player("p3");
    ActionId a0 = b.add_action(p1, "a0"), a1 = b.add_action(p1, "a1");
    ActionId d2 = b.add_action(p2, "d2"), c2 = b.add_action(p2, "c2");
    ActionId d3 = b.add_action(p3, "d3"), c3 = b.add_action(p3, "c3");
    StateId s = b.add_state();
    b.set_initial(s);
    for (ActionId x : {a0, a1})
        for (ActionId y : {d2, c2})
            for (ActionId z : {d3, c3}) {
                StateId t = b.add_state();
                b.add_row(t, {kIdle, kIdle, kIdle}, {{t, 1}});
                b.add_row(s, {x, y, z}, {{t, 1}});
            }
    return b.finish(false);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("counter builds a three-state chain") {
    auto m = load_model_text(kCounter);
    CHECK(m.game.num_states() == 3);
    CHECK(m.game.num_rows() == 3);
    CHECK(m.game.num_players() == 2);
}

TEST_CASE("figure one game has six states") {
    auto m = testutil::load("medium_access_fig1.csg");
    const Csg& g = m.game;
    CHECK(g.num_states() == 6);
    StateId init = g.initial_states().front();
    CHECK(g.row_end(init) - g.row_begin(init) == 4);
    CHECK(g.label("sent1") != nullptr);
    std::size_t terminal = 0;
    for (StateId s = 0; s < g.num_states(); ++s) {
        bool absorbing = true;
        for (std::size_t r = g.row_begin(s); r < g.row_end(s); ++r)
            for (std::size_t t = g.trans_begin(r); t < g.trans_end(r); ++t)
                if (g.succ(t) != s) absorbing = false;
        if (absorbing) ++terminal;
    }
    CHECK(terminal == 3);
}

TEST_CASE("medium access port matches the published size") {
    auto m = testutil::load("medium_access.csg", {{"emax", "10"}});
    CHECK(m.game.num_states() == 441);
    CHECK(m.game.num_rows() == 1600);
    CHECK(m.game.num_transitions() == 2759);
}

TEST_CASE("distributions sum to one exactly") {
    for (const char* name : {"medium_access_fig1.csg", "medium_access.csg", "robot_coordination.csg"}) {
        auto m = testutil::load(name);
        const Csg& g = m.game;
        REQUIRE(g.exact());
        for (std::size_t r = 0; r < g.num_rows(); ++r) {
            Rational sum = 0;
            for (std::size_t t = g.trans_begin(r); t < g.trans_end(r); ++t) sum += g.exact_prob(t);
            CHECK(sum == 1);
        }
    }
}

TEST_CASE("construction is deterministic") {
    auto a = testutil::load("robot_coordination.csg");
    auto b = testutil::load("robot_coordination.csg");
    CHECK(write_explicit(a.game) == write_explicit(b.game));
}

TEST_CASE("explicit export round-trips") {
    for (const char* name : {"medium_access_fig1.csg", "power_control.csg"}) {
        auto m = testutil::load(name, name == std::string("power_control.csg")
                                          ? std::map<std::string, std::string>{{"emax", "6"}}
                                          : std::map<std::string, std::string>{});
        std::string text = write_explicit(m.game);
        Csg back = parse_explicit(text);
        CHECK(back.num_states() == m.game.num_states());
        CHECK(back.num_rows() == m.game.num_rows());
        CHECK(back.num_transitions() == m.game.num_transitions());
        CHECK(write_explicit(back) == text);
    }
}

TEST_CASE("construction errors") {
    SUBCASE("probabilities not summing to one") {
        CHECK(build_error(R"(csg
player p1 m endplayer
player p2 n endplayer
module m
  x : [0..1] init 0;
  [a] x=0 -> 0.5:(x'=1) + 0.4:(x'=0);
endmodule
module n
  [b] true -> true;
endmodule
)") == ErrorCode::ProbabilitySum);
    }
    SUBCASE("no modules") {
        CHECK(build_error("csg\nplayer p1 endplayer\n") == ErrorCode::Syntax);
    }
    SUBCASE("update leaves the range") {
        CHECK(build_error(R"(csg
player p1 m endplayer
player p2 n endplayer
module m
  x : [0..1] init 0;
  [a] true -> (x'=x+1);
endmodule
module n
  [b] true -> true;
endmodule
)") == ErrorCode::RangeOverflow);
    }
    SUBCASE("two commands of one action enabled together") {
        CHECK(build_error(R"(csg
player p1 m endplayer
player p2 n endplayer
module m
  x : [0..1] init 0;
  [a] true -> (x'=0);
  [a] true -> (x'=1);
endmodule
module n
  [b] true -> true;
endmodule
)") == ErrorCode::UpdateClash);
    }
    SUBCASE("action list with two actions of one player") {
        CHECK(build_error(R"(csg
player p1 m endplayer
player p2 n endplayer
module m
  x : [0..1] init 0;
  [a] true -> true;
  [c] true -> true;
  [a,c] true -> true;
endmodule
module n
  [b] true -> true;
endmodule
)") == ErrorCode::AlphabetViolation);
    }
    SUBCASE("undeclared variable") {
        CHECK(build_error(R"(csg
player p1 m endplayer
player p2 n endplayer
module m
  x : [0..1] init 0;
  [a] y=0 -> true;
endmodule
module n
  [b] true -> true;
endmodule
)") == ErrorCode::UndeclaredSymbol);
    }
    SUBCASE("constant without a value") {
        CHECK(build_error(R"(csg
const int K;
player p1 m endplayer
player p2 n endplayer
module m
  x : [0..K] init 0;
  [a] true -> true;
endmodule
module n
  [b] true -> true;
endmodule
)") == ErrorCode::UndefinedConstant);
    }
    SUBCASE("override of an unknown constant") {
        CHECK(build_error(kCounter, {{"nope", "1"}}) == ErrorCode::UndeclaredSymbol);
    }
}

TEST_CASE("constant overrides change the game") {
    auto small = testutil::load("robot_coordination.csg", {{"l", "3"}});
    auto big = testutil::load("robot_coordination.csg", {{"l", "5"}});
    CHECK(small.game.num_states() < big.game.num_states());
}

TEST_CASE("published sizes of robot and power models") {
    auto robot = testutil::load("robot_coordination.csg", {{"l", "10"}});
    CHECK(robot.game.num_states() == 9802);
    CHECK(robot.game.num_rows() == 66514);
    CHECK(robot.game.num_transitions() == 543524);
    auto power = testutil::load("power_control.csg");
    CHECK(power.game.num_states() == 2346);
    CHECK(power.game.num_rows() == 6802);
    CHECK(power.game.num_transitions() == 13574);
}

}

TEST_SUITE("coalition") {

TEST_CASE("coalition game regroups the stag hunt") {
    Csg g = three_player_stag_hunt();
    // Payoffs per (a, number of cooperators among p2 and p3).
    const Rational z1[2][3] = {{2, 2, 2}, {0, 4, 6}};
    const Rational z2[2][3] = {{4, 2, 0}, {4, 6, 9}};
    std::vector<std::array<Rational, 2>> cont(g.num_states(), {Rational(0), Rational(0)});
    for (std::size_t r = g.row_begin(0); r < g.row_end(0); ++r) {
        auto joint = g.joint_action(r);
        std::size_t a = g.action_name(joint[0]) == "a1";
        std::size_t coop = (g.action_name(joint[1]) == "c2") + (g.action_name(joint[2]) == "c3");
        cont[g.succ(g.trans_begin(r))] = {z1[a][coop], z2[a][coop]};
    }
    CoalitionGame cg(g, {0});
    REQUIRE(cg.rows(0) == 2);
    REQUIRE(cg.cols(0) == 4);
    CHECK(cg.members(1) == std::vector<PlayerId>{1, 2});
    BimatrixGame bg = local_game(cg, 0, cont);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            auto tuple = cg.tuple(0, 1, j);
            std::size_t coop = (g.action_name(tuple[0]) == "c2") + (g.action_name(tuple[1]) == "c3");
            CHECK(bg.payoff1(i, j) == z1[i][coop]);
            CHECK(bg.payoff2(i, j) == z2[i][coop]);
        }

    CoalitionGame pair(g, {1, 2});
    CHECK(pair.rows(0) == 4);
    CHECK(pair.cols(0) == 2);
    CHECK(pair.tuple(0, 0, 0).size() == 2);
}

TEST_CASE("coalition rows reproduce the base rows") {
    auto m = testutil::load("robot_coordination.csg", {{"l", "3"}});
    const Csg& g = m.game;
    CoalitionGame cg(g, {1});
    for (StateId s = 0; s < g.num_states(); ++s) {
        CHECK(cg.rows(s) * cg.cols(s) == g.row_end(s) - g.row_begin(s));
        std::set<std::size_t> seen;
        for (std::size_t i = 0; i < cg.rows(s); ++i)
            for (std::size_t j = 0; j < cg.cols(s); ++j) {
                std::size_t row = cg.row(s, i, j);
                auto joint = g.joint_action(row);
                CHECK(joint[1] == cg.tuple(s, 0, i)[0]);
                CHECK(joint[0] == cg.tuple(s, 1, j)[0]);
                seen.insert(row);
            }
        CHECK(seen.size() == cg.rows(s) * cg.cols(s));
    }
}

TEST_CASE("coalition must be a proper nonempty subset") {
    auto m = testutil::load("medium_access_fig1.csg");
    CHECK_THROWS_WITH_AS(CoalitionGame(m.game, {}), doctest::Contains("empty"), Error);
    CHECK_THROWS_AS(CoalitionGame(m.game, {0, 1}), Error);
    try {
        CoalitionGame(m.game, {0, 1});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FullCoalition);
    }
}

TEST_CASE("figure one alphabets include idle") {
    auto m = testutil::load("medium_access_fig1.csg");
    CoalitionGame cg(m.game, {0});
    CHECK(cg.alphabet(0).size() == 3);
    CHECK(cg.alphabet(1).size() == 3);
}

TEST_CASE("joint MDP of the figure one game") {
    auto m = testutil::load("medium_access_fig1.csg");
    CoalitionGame cg(m.game, {0});
    Mdp mdp = joint_mdp(cg);
    StateId init = m.game.initial_states().front();
    CHECK(mdp.choice_begin[init + 1] - mdp.choice_begin[init] == 4);
    CHECK(mdp.num_choices() == m.game.num_rows());
    CHECK(mdp.num_transitions() == m.game.num_transitions());
}

}

TEST_SUITE("mecs") {

TEST_CASE("cycle of the oscillation fixture is non-terminal") {
    auto m = testutil::load("fixtures/oscillation_prob.csg");
    auto mecs = enumerate_mecs(m.game);
    REQUIRE(mecs.size() == 3);
    CHECK(mecs[0].states == std::vector<StateId>{0, 1});
    CHECK(mecs[0].non_terminal);
    CHECK(mecs[1].states == std::vector<StateId>{2});
    CHECK_FALSE(mecs[1].non_terminal);
    CHECK_FALSE(mecs[2].non_terminal);
}

TEST_CASE("figure one absorbing states are terminal singletons") {
    auto m = testutil::load("medium_access_fig1.csg");
    const Csg& g = m.game;
    auto mecs = enumerate_mecs(g);
    std::size_t terminal = 0;
    for (const auto& ec : mecs)
        if (!ec.non_terminal) {
            CHECK(ec.states.size() == 1);
            ++terminal;
        }
    CHECK(terminal == 3);
}

TEST_CASE("acyclic games have only their sinks") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Csg g = testutil::random_game(rng, 5, 2, true);
        auto mecs = enumerate_mecs(g);
        REQUIRE(mecs.size() == 1);
        CHECK(mecs[0].states == std::vector<StateId>{4});
        CHECK_FALSE(mecs[0].non_terminal);
    }
}

TEST_CASE("random games agree with subset enumeration") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 150; ++trial) {
        CAPTURE(trial);
        Csg g = testutil::random_game(rng, 2 + trial % 5, 2);
        auto got = enumerate_mecs(g);
        auto want = oracle::maximal_end_components(g);
        REQUIRE(got.size() == want.size());
        for (std::size_t k = 0; k < got.size(); ++k) {
            CHECK(got[k].states == want[k].states);
            CHECK(got[k].rows == want[k].rows);
            CHECK(got[k].non_terminal == want[k].non_terminal);
        }
    }
}

}
