#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csgnash/csg.hpp"
#include "csgnash/expr.hpp"

namespace csgnash {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class PathOp { Next, Until, BoundedUntil };

struct PathFormula {
    PathOp op = PathOp::Until;
    FormulaPtr left;   // null for Next
    FormulaPtr right;
    std::size_t bound = 0;    // BoundedUntil
    bool eventually = false;  // written as F (left is `true`)
};

enum class RewardOp { Instant, Cumulative, Reach };

struct RewardFormula {
    RewardOp op = RewardOp::Reach;
    std::size_t bound = 0;  // I=k, C<=k
    FormulaPtr target;      // F
};

// One half of a Nash objective sum, or the body of a zero-sum operator.
struct Objective {
    bool is_reward = false;
    std::string reward;    // reward structure name
    std::size_t reward_index = 0;
    PathFormula path;
    RewardFormula rho;

    bool finite_horizon() const;
};

enum class Comparison { Lt, Le, Ge, Gt };
const char* comparison_text(Comparison c);
bool compare(const Rational& lhs, Comparison c, const Rational& rhs);
bool compare(double lhs, Comparison c, double rhs);

struct Threshold {
    Comparison cmp = Comparison::Ge;
    Rational value;
};

enum class FormulaKind { True, False, Label, Expression, Not, And, Or, Implies, Iff, Prob, Reward, Nash };

struct Formula {
    FormulaKind kind = FormulaKind::True;
    std::string label;                // Label
    ExprPtr expr;                     // Expression (compiled against the game)
    std::vector<FormulaPtr> args;     // connectives
    std::vector<PlayerId> coalition;  // Prob / Reward / Nash: first coalition, sorted
    std::vector<PlayerId> others;     // Nash: second coalition, sorted
    Objective objective[2];           // Prob/Reward use objective[0]
    std::optional<Threshold> threshold;  // empty: numerical query
    bool minimise = false;            // Prob/Reward numerical: min=? instead of max=?
};

struct NashQuery {
    std::vector<PlayerId> coalition;
    std::vector<PlayerId> others;
    Objective first;
    Objective second;
    std::optional<Threshold> threshold;
};

NashQuery nash_query(const Formula& f);

enum class Horizon { BothFinite, BothInfinite, FirstFinite, SecondFinite };
Horizon classify_horizon(const NashQuery& q);
const char* horizon_name(Horizon h);

struct PropertyContext {
    const Csg* game = nullptr;
    // Model constants plus any extra names (e.g. a swept bound).
    const std::map<std::string, Value>* constants = nullptr;
};

FormulaPtr parse_property(std::string_view text, const PropertyContext& ctx);

// Properties of a file: one per line, `//` comments, blank lines skipped.
std::vector<std::string> split_property_file(const std::string& text);

// Fully parenthesised text that parses back to an equal formula.
std::string print_formula(const Formula& f, const Csg& game);
bool formula_equal(const Formula& a, const Formula& b);

}  // namespace csgnash
