#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "csgnash/csg.hpp"
#include "csgnash/evaluator.hpp"
#include "csgnash/model_language.hpp"
#include "csgnash/property.hpp"

namespace testutil {

inline std::string model_path(const std::string& name) { return std::string(CSGNASH_SOURCE_DIR) + "/models/" + name; }

inline csgnash::Model load(const std::string& name, const std::map<std::string, std::string>& overrides = {}) {
    return csgnash::load_model_file(model_path(name), overrides);
}

inline csgnash::PropertyResult check(const csgnash::Model& m, const std::string& property,
                                     const csgnash::EvalOptions& options = {}) {
    csgnash::PropertyContext ctx{&m.game, &m.constants};
    auto f = csgnash::parse_property(property, ctx);
    csgnash::Evaluator ev(m.game, options);
    return ev.evaluate(*f);
}

inline csgnash::StateSet label(const csgnash::Csg& g, const std::string& name) { return *g.label(name); }

// Random two-player game: every state offers each player one to `max_actions`
// actions and every joint action a distribution over up to three successors.
// Probabilities are multiples of 1/4.
inline csgnash::Csg random_game(std::mt19937& rng, std::size_t states, std::size_t max_actions,
                                bool acyclic = false) {
    using namespace csgnash;
    CsgBuilder b;
    PlayerId p1 = b.add_player("p1"), p2 = b.add_player("p2");
    std::vector<ActionId> a1, a2;
    for (std::size_t k = 0; k < max_actions; ++k) {
        a1.push_back(b.add_action(p1, "a" + std::to_string(k)));
        a2.push_back(b.add_action(p2, "b" + std::to_string(k)));
    }
    for (std::size_t s = 0; s < states; ++s) b.add_state();
    b.set_initial(0);
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    for (StateId s = 0; s < states; ++s) {
        std::size_t n1 = pick(1, max_actions), n2 = pick(1, max_actions);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) {
                std::size_t lo = acyclic ? std::min<std::size_t>(s + 1, states - 1) : 0;
                if (acyclic && s + 1 == states) lo = s;
                std::map<StateId, Rational> merged;
                std::size_t parts = pick(1, 3);
                std::vector<std::size_t> quarters(parts, 1);
                for (std::size_t q = parts; q < 4; ++q) ++quarters[pick(0, parts - 1)];
                for (std::size_t q = 0; q < parts; ++q)
                    merged[static_cast<StateId>(pick(lo, states - 1))] += Rational(static_cast<long>(quarters[q])) / 4;
                b.add_row(s, {a1[i], a2[j]}, {merged.begin(), merged.end()});
            }
    }
    auto random_set = [&]() {
        StateSet t(states, false);
        for (std::size_t s = 0; s < states; ++s) t[s] = pick(0, 2) == 0;
        return t;
    };
    b.add_label("t1", random_set());
    b.add_label("t2", random_set());
    return b.finish(false);
}

}  // namespace testutil
