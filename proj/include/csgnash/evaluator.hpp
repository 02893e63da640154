#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "csgnash/csg.hpp"
#include "csgnash/nash_engine.hpp"
#include "csgnash/property.hpp"

namespace csgnash {

struct EvalOptions {
    NashOptions nash;
    bool verify = false;          // run verify_epsilon_ne on the top-level profile
    double verify_epsilon = 1e-4;
};

struct PropertyResult {
    FormulaKind kind = FormulaKind::True;
    bool numerical = false;  // max=? / min=? query
    StateSet sat;            // threshold and boolean formulae
    bool holds = false;      // sat at every initial state

    // Numerical results at the first initial state.
    double value = 0.0;  // zero-sum P/R
    std::array<double, 2> pair{};
    double sum = 0.0;
    std::optional<std::array<Rational, 2>> exact_pair;

    // Top-level Nash node, when present.
    std::optional<NashResult> nash;
    std::optional<VerifyReport> verify;

    bool converged = true;  // false if any Nash computation failed to converge
    std::size_t iterations = 0;
    double mdp_seconds = 0.0;
    double csg_seconds = 0.0;
    std::vector<std::string> warnings;
};

class Evaluator {
public:
    Evaluator(const Csg& game, EvalOptions options = {});

    PropertyResult evaluate(const Formula& f);

    // Satisfaction set of a state formula.
    StateSet sat(const Formula& f);

    // Objective of a Nash node with its state subformulae resolved.
    ObjectiveSpec objective_spec(const Objective& o);

private:
    StateSet nash_sat(const Formula& f);
    StateSet zero_sum_sat(const Formula& f);
    std::vector<double> zero_sum_values(const Formula& f);
    NashResult run_nash(const Formula& f);

    const Csg& game_;
    EvalOptions options_;
    PropertyResult* current_ = nullptr;
};

// Tolerant comparison of a computed sum against a threshold.
bool threshold_holds(double value, const Threshold& t, double tolerance);

}  // namespace csgnash
