#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csgnash/error.hpp"
#include "csgnash/rational.hpp"

namespace csgnash {

// ---------------------------------------------------------------------------
// Tokens

enum class Tok {
    End, Ident, Int, Decimal, String,
    LParen, RParen, LBrack, RBrack, LBrace, RBrace,
    Comma, Semi, Colon, Prime, Question, DotDot,
    Eq, Neq, Lt, Le, Gt, Ge,
    And, Or, Not, Implies, Iff,
    Plus, Minus, Star, Slash,
    Arrow, CoalOpen, CoalClose,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourcePos pos;
};

std::vector<Token> tokenize(std::string_view text);
const char* token_name(Tok t);

// Cursor over a token vector with the usual helpers.
class TokenStream {
public:
    explicit TokenStream(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[k];
    }
    bool at(Tok t) const { return peek().kind == t; }
    bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept(Tok t) {
        if (!at(t)) return false;
        next();
        return true;
    }
    bool accept_word(std::string_view w) {
        if (!at_word(w)) return false;
        next();
        return true;
    }
    Token expect(Tok t, const char* what = nullptr);
    void expect_word(std::string_view w);
    [[noreturn]] void error(const std::string& msg) const;
    std::size_t position() const { return pos_; }
    void rewind(std::size_t p) { pos_ = p; }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Values and expressions

enum class ValueType { Bool, Int, Rat, Real };
const char* value_type_name(ValueType t);

struct Value {
    ValueType type = ValueType::Int;
    bool b = false;
    std::int64_t i = 0;
    Rational q;
    double d = 0.0;

    static Value boolean(bool v);
    static Value integer(std::int64_t v);
    static Value rational(const Rational& v);  // stays Rat even if integral
    static Value real(double v);

    Rational as_rational() const;  // Real converted exactly
    double as_double() const;
    std::string text() const;
};

enum class ExprOp {
    Literal, Ident, Var,
    Neg, Not,
    Add, Sub, Mul, Div,
    Eq, Neq, Lt, Le, Gt, Ge,
    And, Or, Implies, Iff,
    Ite, Call,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprOp op = ExprOp::Literal;
    ValueType type = ValueType::Int;  // meaningful after compile
    Value literal;
    std::string name;  // Ident / Call name / Var name
    int slot = -1;     // Var
    bool quoted = false;  // Ident written as "name"
    std::vector<ExprPtr> args;
    SourcePos pos;
};

// Parses a full expression (ternary level).
ExprPtr parse_expression(TokenStream& ts);
ExprPtr parse_expression_text(std::string_view text);
// Parses a comparison-level expression (no boolean connectives).
ExprPtr parse_relational(TokenStream& ts);

std::string print_expression(const Expr& e);

// Resolution environment used by compile().
struct ExprScope {
    // Constants by name (already evaluated).
    const std::map<std::string, Value>* constants = nullptr;
    // Variable lookup: returns slot and type.
    std::function<std::optional<std::pair<int, ValueType>>(const std::string&)> variable;
};

// Resolves identifiers, assigns static types and folds constant subtrees.
ExprPtr compile(const ExprPtr& e, const ExprScope& scope);
// Identifier substitution used for module renaming.
ExprPtr rename(const ExprPtr& e, const std::map<std::string, std::string>& map);

using Valuation = std::span<const std::int32_t>;

bool eval_bool(const Expr& e, Valuation vals);
std::int64_t eval_int(const Expr& e, Valuation vals);
Rational eval_rational(const Expr& e, Valuation vals);  // Real results converted exactly
double eval_real(const Expr& e, Valuation vals);
Value eval_value(const Expr& e, Valuation vals);
// True when the expression (or a subexpression) is typed Real.
bool involves_real(const Expr& e);

ExprPtr make_literal(Value v, SourcePos pos = {});
ExprPtr make_binary(ExprOp op, ExprPtr a, ExprPtr b, SourcePos pos = {});

}  // namespace csgnash
