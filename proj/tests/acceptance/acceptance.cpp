// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "csgnash/bimatrix.hpp"
#include "csgnash/coalition.hpp"
#include "csgnash/error.hpp"
#include "csgnash/evaluator.hpp"
#include "csgnash/nash_engine.hpp"
#include "oracles/oracles.hpp"
#include "test_util.hpp"

using namespace csgnash;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

const char* kSent = "<<p1:p2>>max=? (P[F \"sent1\"] + P[F \"sent2\"])";
const char* kFirst = "<<p1:p2>>max=? (P[!\"send2\" U \"send1\"] + P[!\"send1\" U \"send2\"])";
const char* kGoals = "<<p1:p2>>max=? (P[F \"goal1\"] + P[F \"goal2\"])";
const char* kGoalsBounded = "<<p1:p2>>max=? (P[F<=3 \"goal1\"] + P[F<=3 \"goal2\"])";
const char* kAloha = "<<p1:p2,p3>>max=? (P[F (\"sent1\" & t<=D)] + P[F (\"sent2\" & \"sent3\" & t<=D)])";

EvalOptions verified() {
    EvalOptions o;
    o.verify = true;
    o.verify_epsilon = 1e-4;
    return o;
}

// Gaps at the initial states of a verified result.
void require_small_gaps(Outcome& out, const PropertyResult& r, const std::string& name) {
    if (!r.verify) {
        out.require(false, name + ": no verification report");
        return;
    }
    out.detail << " " << name << " gaps=(" << r.verify->gap[0] << ", " << r.verify->gap[1] << ")";
    out.require(r.verify->gap[0] <= 1e-4 && r.verify->gap[1] <= 1e-4 && r.verify->pass, name + " gap above 1e-4");
}

Outcome stag_hunt() {
    Outcome out;
    auto t0 = Clock::now();
    auto g = BimatrixGame::from_rows({{2, 2, 2}, {0, 4, 6}}, {{4, 2, 0}, {4, 6, 9}});
    auto eqs = enumerate_equilibria(g);
    auto sol = solve_swne(g);
    const double t = since(t0);
    out.require(eqs.size() == 3, "three equilibria");
    std::multiset<std::pair<std::string, std::string>> values;
    bool mixed = false;
    for (const auto& e : eqs) {
        values.insert({to_string(e.u), to_string(e.v)});
        if (e.x == std::vector<Rational>{Rational(5, 9), Rational(4, 9)} &&
            e.y == std::vector<Rational>{Rational(2, 3), 0, Rational(1, 3)})
            mixed = true;
        out.require(is_equilibrium(g, e.x, e.y, e.u, e.v, 0), "certificate");
    }
    std::multiset<std::pair<std::string, std::string>> want{{"2", "4"}, {"2", "4"}, {"6", "9"}};
    out.require(values == want, "values (2,4), (2,4), (6,9)");
    out.require(mixed, "mixed equilibrium x=(5/9,4/9) y=(2/3,0,1/3)");
    out.require(sol.profile.u == 6 && sol.profile.v == 9, "SWNE (6,9)");
    out.require(oracle::profile_keys(eqs) == oracle::profile_keys(oracle::nfg_equilibria(g)), "oracle equilibria");
    out.require(t < 1.0, "under 1 s");
    out.detail << " " << eqs.size() << " equilibria, SWNE (" << to_string(sol.profile.u) << ", "
               << to_string(sol.profile.v) << ") sum " << to_string(sol.profile.u + sol.profile.v) << ", " << t << " s";
    return out;
}

// Profiles of criterion 2, shared with criterion 8.
std::vector<std::pair<std::string, PropertyResult>> g_verified;

Outcome medium_access_fig1() {
    Outcome out;
    {
        auto t0 = Clock::now();
        auto m = testutil::load("medium_access_fig1.csg");
        auto r = testutil::check(m, kSent, verified());
        const double t = since(t0);
        out.require(close(r.pair[0], 1.0, 1e-6) && close(r.pair[1], 1.0, 1e-6), "F-sent pair (1,1)");
        out.require(close(r.sum, 2.0, 1e-6), "F-sent sum 2");
        out.require(t < 1.0, "F-sent under 1 s");
        out.detail << " F-sent pair=(" << r.pair[0] << ", " << r.pair[1] << ") " << t << " s;";
        g_verified.emplace_back("fig1 F-sent", std::move(r));
    }
    {
        auto t0 = Clock::now();
        auto m = testutil::load("medium_access_fig1.csg", {{"q2", "0.75"}});
        auto r = testutil::check(m, kFirst, verified());
        const double t = since(t0);
        const Csg& g = m.game;
        auto s1 = testutil::label(g, "send1"), s2 = testutil::label(g, "send2");
        StateSet not1(g.num_states()), not2(g.num_states());
        for (StateId s = 0; s < g.num_states(); ++s) {
            not1[s] = !s1[s];
            not2[s] = !s2[s];
        }
        auto want = oracle::best_pure_memoryless_ne(g, {not2, not1}, {s1, s2}, g.initial_states().front());
        out.require(want.has_value(), "oracle finds an equilibrium");
        if (want) {
            out.require(close(r.pair[0], (*want)[0].get_d(), 1e-6) && close(r.pair[1], (*want)[1].get_d(), 1e-6),
                        "until pair matches the profile enumeration");
            out.detail << " until oracle=(" << to_string((*want)[0]) << ", " << to_string((*want)[1]) << ")";
        }
        out.require(close(r.pair[0], 0.75, 1e-6) && close(r.pair[1], 0.75, 1e-6), "until pair (0.75,0.75)");
        out.require(t < 1.0, "until under 1 s");
        out.detail << " got=(" << r.pair[0] << ", " << r.pair[1] << ") " << t << " s";
        g_verified.emplace_back("fig1 until", std::move(r));
    }
    return out;
}

ObjectiveSpec objective(ObjectiveKind kind, const StateSet& target) {
    ObjectiveSpec o;
    o.kind = kind;
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

NashOptions traced() {
    NashOptions o;
    o.exact = true;
    o.trace_states = {0};
    o.trace_limit = 4;
    return o;
}

std::string trace_text(const NashResult& r) {
    std::string s;
    for (const auto& e : r.trace) s += " (" + to_string(e.v1) + "," + to_string(e.v2) + ")";
    return s;
}

Outcome oscillation_probability() {
    Outcome out;
    auto m = testutil::load("fixtures/oscillation_prob.csg");
    auto p = pair_problem(m.game, objective(ObjectiveKind::Until, testutil::label(m.game, "a1")),
                          objective(ObjectiveKind::Until, testutil::label(m.game, "a2")));
    auto rep = check_assumption(p);
    out.require(!rep.holds && rep.non_terminal.size() == 1 && rep.non_terminal[0].states == std::vector<StateId>{0, 1},
                "non-terminal end component {s1,s2}");
    auto res = solve_nash(p, traced());
    const std::vector<std::pair<Rational, Rational>> want{
        {Rational(1, 4), Rational(3, 4)}, {Rational(3, 4), Rational(1, 4)},
        {Rational(1, 4), Rational(3, 4)}, {Rational(3, 4), Rational(1, 4)}};
    bool match = res.trace.size() == want.size();
    for (std::size_t n = 0; match && n < want.size(); ++n)
        match = res.trace[n].v1 == want[n].first && res.trace[n].v2 == want[n].second;
    out.require(match, "iterates 1-4");
    out.require(!res.converged, "NotConverged");
    out.require(res.oscillating && res.diagnostic.find("oscillate") != std::string::npos, "oscillation diagnostic");
    out.detail << " iterates" << trace_text(res) << ", " << (res.converged ? "converged" : "NotConverged");
    return out;
}

Outcome oscillation_reward() {
    Outcome out;
    auto m = testutil::load("fixtures/oscillation_reward.csg");
    const StateSet a = testutil::label(m.game, "a");
    ObjectiveSpec o1 = objective(ObjectiveKind::ReachReward, a), o2 = objective(ObjectiveKind::ReachReward, a);
    o1.reward = *m.game.find_reward("r1");
    o2.reward = *m.game.find_reward("r2");
    auto p = pair_problem(m.game, o1, o2);
    auto rep = check_assumption(p);
    out.require(!rep.holds && !rep.not_almost_sure[0].empty(), "targets not reached almost surely");
    auto res = solve_nash(p, traced());
    bool match = res.trace.size() == 4;
    for (std::size_t n = 0; match && n < 4; ++n) {
        bool first = n % 2 == 0;
        match = res.trace[n].v1 == (first ? Rational(1, 3) : Rational(2)) &&
                res.trace[n].v2 == (first ? Rational(1) : Rational(1, 3));
    }
    out.require(match, "iterates alternate (1/3,1) / (2,1/3)");
    out.require(!res.converged, "NotConverged");
    out.detail << " iterates" << trace_text(res) << ", " << (res.converged ? "converged" : "NotConverged");
    return out;
}

Outcome robot() {
    Outcome out;
    auto t0 = Clock::now();
    auto m = testutil::load("robot_coordination.csg", {{"l", "4"}, {"q", "0.1"}});
    auto r = testutil::check(m, kGoals, verified());
    const double t = since(t0);
    out.require(close(r.sum, 2.0, 1e-4), "sum 2.0 +- 1e-4");
    out.require(t < 30.0, "under 30 s");
    out.detail << " F-goal sum=" << r.sum << " " << t << " s;";

    auto b = testutil::check(m, kGoalsBounded, verified());
    const Csg& g = m.game;
    auto want = oracle::bounded_nash(g, testutil::label(g, "goal1"), testutil::label(g, "goal2"), 3);
    const auto& w = want[g.initial_states().front()];
    out.require(b.exact_pair.has_value() && (*b.exact_pair)[0] == w[0] && (*b.exact_pair)[1] == w[1],
                "bounded k=3 matches backward induction");
    out.detail << " k=3 oracle=(" << to_string(w[0]) << ", " << to_string(w[1]) << ")";
    if (b.exact_pair) out.detail << " got=(" << to_string((*b.exact_pair)[0]) << ", " << to_string((*b.exact_pair)[1]) << ")";
    g_verified.emplace_back("robot F-goal", std::move(r));
    g_verified.emplace_back("robot F<=3", std::move(b));
    return out;
}

Outcome medium_access_construction() {
    Outcome out;
    auto m = testutil::load("medium_access.csg", {{"emax", "10"}});
    out.require(m.game.num_states() == 441, "441 states");
    out.require(m.game.num_transitions() == 2759, "2,759 transitions");
    out.detail << " " << m.game.num_states() << " states, " << m.game.num_transitions() << " transitions";
    return out;
}

// Equilibria of g against the brute-force oracle, with the exact certificate.
bool bimatrix_agrees(const BimatrixGame& g) {
    auto got = enumerate_equilibria(g);
    auto want = oracle::nfg_equilibria(g);
    if (oracle::profile_keys(got) != oracle::profile_keys(want)) return false;
    for (const auto& e : got)
        if (!is_equilibrium(g, e.x, e.y, e.u, e.v, 0)) return false;
    auto sol = solve_swne(g);
    auto vals = oracle::swne_values(want);
    return sol.profile.u == vals[0] && sol.profile.v == vals[1] &&
           is_equilibrium(g, sol.profile.x, sol.profile.y, sol.profile.u, sol.profile.v, 0);
}

Outcome bimatrix_suite() {
    Outcome out;
    auto t0 = Clock::now();
    std::mt19937 rng(2024);
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    std::uniform_int_distribution<int> pay(-5, 5);
    int failures = 0;
    for (int trial = 0; trial < 200; ++trial) {
        BimatrixGame g(dim(rng), dim(rng));
        for (auto& z : g.z1) z = pay(rng);
        for (auto& z : g.z2) z = pay(rng);
        if (!bimatrix_agrees(g)) ++failures;
    }
    const double t = since(t0);
    out.require(failures == 0, std::to_string(failures) + " games disagree");
    out.require(t < 60.0, "under 60 s");
    out.detail << " 200 games, " << failures << " mismatches, " << t << " s";
    return out;
}

Outcome verification() {
    Outcome out;
    out.require(g_verified.size() == 4, "profiles of criteria 2 and 5 available");
    for (const auto& [name, r] : g_verified) require_small_gaps(out, r, name);
    return out;
}

Outcome aloha() {
    Outcome out;
    auto t0 = Clock::now();
    auto m = testutil::load("aloha.csg", {{"bmax", "2"}, {"D", "8"}});
    out.detail << " " << m.game.num_states() << " states (expected 17057);";
    out.require(m.game.num_states() == 17057, "17,057 states");
    auto r = testutil::check(m, kAloha, verified());
    const double t = since(t0);
    out.require(t < 600.0, "query under 10 min");
    out.detail << " sum=" << r.sum << " " << t << " s;";
    require_small_gaps(out, r, "profile");

    // Local games of the synthesised profile against the bimatrix oracle.
    if (!r.nash || !r.nash->profile) {
        out.require(false, "no synthesised profile");
        return out;
    }
    const NashResult& res = *r.nash;
    const Csg& g = *res.solved.game;
    CoalitionGame cg(g, res.solved.coalition);
    std::vector<std::array<Rational, 2>> cont(g.num_states());
    for (StateId s = 0; s < g.num_states(); ++s) cont[s] = {Rational(res.values[s][0]), Rational(res.values[s][1])};
    const auto& eq = res.profile->equilibrium.front();
    std::size_t games = 0, failures = 0;
    for (StateId s = 0; s < eq.size(); ++s) {
        if (eq[s].x.empty()) continue;
        ++games;
        if (!bimatrix_agrees(local_game(cg, s, cont))) ++failures;
    }
    out.require(failures == 0, std::to_string(failures) + " local games disagree with the oracle");
    out.detail << " " << games << " local games, " << failures << " mismatches";
    return out;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"stag hunt equilibria and SWNE", stag_hunt},
        {"medium access (6 states) pairs", medium_access_fig1},
        {"oscillating probabilities fixture", oscillation_probability},
        {"alternating rewards fixture", oscillation_reward},
        {"robot coordination l=4", robot},
        {"medium access emax=10 construction", medium_access_construction},
        {"random bimatrix games vs oracle", bimatrix_suite},
        {"epsilon-NE verification", verification},
        {"aloha bmax=2 D=8", aloha},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome out;
        try {
            out = criteria[k].second();
        } catch (const std::exception& e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        std::printf("criterion %zu %s: %s:%s\n", k + 1, out.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                    out.detail.str().c_str());
        std::fflush(stdout);
        if (!out.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
