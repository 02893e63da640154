#include "csgnash/expr.hpp"

#include <cmath>
#include <limits>

namespace csgnash {

// ---------------------------------------------------------------------------
// Lexer

const char* token_name(Tok t) {
    switch (t) {
        case Tok::End: return "end of input";
        case Tok::Ident: return "identifier";
        case Tok::Int: return "integer";
        case Tok::Decimal: return "number";
        case Tok::String: return "string";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrack: return "'['";
        case Tok::RBrack: return "']'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::Comma: return "','";
        case Tok::Semi: return "';'";
        case Tok::Colon: return "':'";
        case Tok::Prime: return "'''";
        case Tok::Question: return "'?'";
        case Tok::DotDot: return "'..'";
        case Tok::Eq: return "'='";
        case Tok::Neq: return "'!='";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::And: return "'&'";
        case Tok::Or: return "'|'";
        case Tok::Not: return "'!'";
        case Tok::Implies: return "'=>'";
        case Tok::Iff: return "'<=>'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Arrow: return "'->'";
        case Tok::CoalOpen: return "'<<'";
        case Tok::CoalClose: return "'>>'";
    }
    return "token";
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto is_ident_start = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto is_digit = [](char c) { return c >= '0' && c <= '9'; };

    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Token tok;
        tok.pos = SourcePos{line, col};
        if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && (is_ident_start(text[j]) || is_digit(text[j]))) ++j;
            tok.kind = Tok::Ident;
            tok.text = std::string(text.substr(i, j - i));
            advance(j - i);
        } else if (is_digit(c)) {
            std::size_t j = i;
            while (j < text.size() && is_digit(text[j])) ++j;
            tok.kind = Tok::Int;
            if (j + 1 < text.size() && text[j] == '.' && is_digit(text[j + 1])) {
                tok.kind = Tok::Decimal;
                ++j;
                while (j < text.size() && is_digit(text[j])) ++j;
            }
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                if (k < text.size() && is_digit(text[k])) {
                    while (k < text.size() && is_digit(text[k])) ++k;
                    tok.kind = Tok::Decimal;
                    j = k;
                }
            }
            tok.text = std::string(text.substr(i, j - i));
            advance(j - i);
        } else if (c == '"') {
            std::size_t j = i + 1;
            while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
            if (j >= text.size() || text[j] != '"') fail(ErrorCode::Syntax, "unterminated string", tok.pos);
            tok.kind = Tok::String;
            tok.text = std::string(text.substr(i + 1, j - i - 1));
            advance(j - i + 1);
        } else {
            auto two = text.substr(i, 2);
            auto three = text.substr(i, 3);
            std::size_t len = 1;
            if (three == "<=>") { tok.kind = Tok::Iff; len = 3; }
            else if (two == "<<") { tok.kind = Tok::CoalOpen; len = 2; }
            else if (two == ">>") { tok.kind = Tok::CoalClose; len = 2; }
            else if (two == "<=") { tok.kind = Tok::Le; len = 2; }
            else if (two == ">=") { tok.kind = Tok::Ge; len = 2; }
            else if (two == "!=") { tok.kind = Tok::Neq; len = 2; }
            else if (two == "=>") { tok.kind = Tok::Implies; len = 2; }
            else if (two == "->") { tok.kind = Tok::Arrow; len = 2; }
            else if (two == "..") { tok.kind = Tok::DotDot; len = 2; }
            else {
                switch (c) {
                    case '(': tok.kind = Tok::LParen; break;
                    case ')': tok.kind = Tok::RParen; break;
                    case '[': tok.kind = Tok::LBrack; break;
                    case ']': tok.kind = Tok::RBrack; break;
                    case '{': tok.kind = Tok::LBrace; break;
                    case '}': tok.kind = Tok::RBrace; break;
                    case ',': tok.kind = Tok::Comma; break;
                    case ';': tok.kind = Tok::Semi; break;
                    case ':': tok.kind = Tok::Colon; break;
                    case '\'': tok.kind = Tok::Prime; break;
                    case '?': tok.kind = Tok::Question; break;
                    case '=': tok.kind = Tok::Eq; break;
                    case '<': tok.kind = Tok::Lt; break;
                    case '>': tok.kind = Tok::Gt; break;
                    case '&': tok.kind = Tok::And; break;
                    case '|': tok.kind = Tok::Or; break;
                    case '!': tok.kind = Tok::Not; break;
                    case '+': tok.kind = Tok::Plus; break;
                    case '-': tok.kind = Tok::Minus; break;
                    case '*': tok.kind = Tok::Star; break;
                    case '/': tok.kind = Tok::Slash; break;
                    default:
                        fail(ErrorCode::Syntax, std::string("unexpected character '") + c + "'", tok.pos);
                }
            }
            tok.text = std::string(text.substr(i, len));
            advance(len);
        }
        out.push_back(std::move(tok));
    }
    Token end;
    end.kind = Tok::End;
    end.pos = SourcePos{line, col};
    out.push_back(end);
    return out;
}

Token TokenStream::expect(Tok t, const char* what) {
    if (!at(t)) {
        std::string msg = std::string("expected ") + (what ? what : token_name(t)) + ", found ";
        msg += peek().kind == Tok::End ? std::string("end of input") : "'" + peek().text + "'";
        error(msg);
    }
    return next();
}

void TokenStream::expect_word(std::string_view w) {
    if (!accept_word(w)) {
        std::string msg = "expected '" + std::string(w) + "', found ";
        msg += peek().kind == Tok::End ? std::string("end of input") : "'" + peek().text + "'";
        error(msg);
    }
}

void TokenStream::error(const std::string& msg) const { fail(ErrorCode::Syntax, msg, peek().pos); }

// ---------------------------------------------------------------------------
// Values

const char* value_type_name(ValueType t) {
    switch (t) {
        case ValueType::Bool: return "bool";
        case ValueType::Int: return "int";
        case ValueType::Rat: return "double";
        case ValueType::Real: return "double";
    }
    return "?";
}

Value Value::boolean(bool v) {
    Value out;
    out.type = ValueType::Bool;
    out.b = v;
    return out;
}

Value Value::integer(std::int64_t v) {
    Value out;
    out.type = ValueType::Int;
    out.i = v;
    return out;
}

Value Value::rational(const Rational& v) {
    Value out;
    out.type = ValueType::Rat;
    out.q = v;
    return out;
}

Value Value::real(double v) {
    Value out;
    out.type = ValueType::Real;
    out.d = v;
    return out;
}

Rational Value::as_rational() const {
    switch (type) {
        case ValueType::Bool: return Rational(b ? 1 : 0);
        case ValueType::Int: return Rational(static_cast<long>(i));
        case ValueType::Rat: return q;
        case ValueType::Real: return rational_from_double(d);
    }
    return Rational(0);
}

double Value::as_double() const {
    switch (type) {
        case ValueType::Bool: return b ? 1.0 : 0.0;
        case ValueType::Int: return static_cast<double>(i);
        case ValueType::Rat: return q.get_d();
        case ValueType::Real: return d;
    }
    return 0.0;
}

namespace {

// Decimal text for rationals whose denominator is 2^a 5^b.
std::optional<std::string> decimal_text(const Rational& q) {
    mpz_class den = q.get_den();
    int twos = 0, fives = 0;
    while (den % 2 == 0) { den /= 2; ++twos; }
    while (den % 5 == 0) { den /= 5; ++fives; }
    if (den != 1) return std::nullopt;
    int digits = std::max(twos, fives);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    mpz_class scaled = q.get_num() * (scale / q.get_den());
    bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string s = scaled.get_str();
    if (digits == 0) return (neg ? "-" : "") + s + ".0";
    while (static_cast<int>(s.size()) <= digits) s.insert(s.begin(), '0');
    s.insert(s.end() - digits, '.');
    return (neg ? "-" : "") + s;
}

}  // namespace

std::string Value::text() const {
    switch (type) {
        case ValueType::Bool: return b ? "true" : "false";
        case ValueType::Int: return std::to_string(i);
        case ValueType::Rat: {
            if (auto d = decimal_text(q)) return *d;
            return to_string(q);
        }
        case ValueType::Real: return format_double(d);
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Parser

namespace {

std::shared_ptr<Expr> node(ExprOp op, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->pos = pos;
    return e;
}

ExprPtr parse_ternary(TokenStream& ts);

ExprPtr parse_primary(TokenStream& ts) {
    const Token& t = ts.peek();
    SourcePos pos = t.pos;
    switch (t.kind) {
        case Tok::Int: {
            Token tok = ts.next();
            auto q = parse_rational(tok.text);
            if (!q.get_num().fits_slong_p()) fail(ErrorCode::Syntax, "integer literal too large", pos);
            return make_literal(Value::integer(q.get_num().get_si()), pos);
        }
        case Tok::Decimal: {
            Token tok = ts.next();
            return make_literal(Value::rational(parse_rational(tok.text)), pos);
        }
        case Tok::String: {
            Token tok = ts.next();
            auto e = node(ExprOp::Ident, pos);
            e->name = tok.text;
            e->quoted = true;
            return e;
        }
        case Tok::LParen: {
            ts.next();
            auto inner = parse_ternary(ts);
            ts.expect(Tok::RParen);
            return inner;
        }
        case Tok::Ident: {
            Token tok = ts.next();
            if (tok.text == "true") return make_literal(Value::boolean(true), pos);
            if (tok.text == "false") return make_literal(Value::boolean(false), pos);
            if (ts.at(Tok::LParen)) {
                ts.next();
                auto call = node(ExprOp::Call, pos);
                call->name = tok.text;
                if (!ts.at(Tok::RParen)) {
                    do {
                        call->args.push_back(parse_ternary(ts));
                    } while (ts.accept(Tok::Comma));
                }
                ts.expect(Tok::RParen);
                return call;
            }
            auto e = node(ExprOp::Ident, pos);
            e->name = tok.text;
            return e;
        }
        default:
            ts.error(std::string("expected an expression, found ") +
                     (t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'"));
    }
}

ExprPtr parse_unary(TokenStream& ts) {
    if (ts.at(Tok::Minus)) {
        SourcePos pos = ts.next().pos;
        auto e = node(ExprOp::Neg, pos);
        e->args.push_back(parse_unary(ts));
        return e;
    }
    return parse_primary(ts);
}

ExprPtr parse_multiplicative(TokenStream& ts) {
    auto lhs = parse_unary(ts);
    while (ts.at(Tok::Star) || ts.at(Tok::Slash)) {
        Token op = ts.next();
        lhs = make_binary(op.kind == Tok::Star ? ExprOp::Mul : ExprOp::Div, lhs, parse_unary(ts), op.pos);
    }
    return lhs;
}

ExprPtr parse_additive(TokenStream& ts) {
    auto lhs = parse_multiplicative(ts);
    while (ts.at(Tok::Plus) || ts.at(Tok::Minus)) {
        Token op = ts.next();
        lhs = make_binary(op.kind == Tok::Plus ? ExprOp::Add : ExprOp::Sub, lhs, parse_multiplicative(ts), op.pos);
    }
    return lhs;
}

ExprPtr parse_not(TokenStream& ts) {
    if (ts.at(Tok::Not)) {
        SourcePos pos = ts.next().pos;
        auto e = node(ExprOp::Not, pos);
        e->args.push_back(parse_not(ts));
        return e;
    }
    return parse_relational(ts);
}

ExprPtr parse_and(TokenStream& ts) {
    auto lhs = parse_not(ts);
    while (ts.at(Tok::And)) {
        Token op = ts.next();
        lhs = make_binary(ExprOp::And, lhs, parse_not(ts), op.pos);
    }
    return lhs;
}

ExprPtr parse_or(TokenStream& ts) {
    auto lhs = parse_and(ts);
    while (ts.at(Tok::Or)) {
        Token op = ts.next();
        lhs = make_binary(ExprOp::Or, lhs, parse_and(ts), op.pos);
    }
    return lhs;
}

ExprPtr parse_iff(TokenStream& ts) {
    auto lhs = parse_or(ts);
    while (ts.at(Tok::Iff)) {
        Token op = ts.next();
        lhs = make_binary(ExprOp::Iff, lhs, parse_or(ts), op.pos);
    }
    return lhs;
}

ExprPtr parse_implies(TokenStream& ts) {
    auto lhs = parse_iff(ts);
    if (ts.at(Tok::Implies)) {
        Token op = ts.next();
        return make_binary(ExprOp::Implies, lhs, parse_implies(ts), op.pos);
    }
    return lhs;
}

ExprPtr parse_ternary(TokenStream& ts) {
    auto cond = parse_implies(ts);
    if (ts.at(Tok::Question)) {
        SourcePos pos = ts.next().pos;
        auto a = parse_ternary(ts);
        ts.expect(Tok::Colon);
        auto b = parse_ternary(ts);
        auto e = node(ExprOp::Ite, pos);
        e->args = {cond, a, b};
        return e;
    }
    return cond;
}

}  // namespace

ExprPtr parse_relational(TokenStream& ts) {
    auto lhs = parse_additive(ts);
    ExprOp op;
    switch (ts.peek().kind) {
        case Tok::Eq: op = ExprOp::Eq; break;
        case Tok::Neq: op = ExprOp::Neq; break;
        case Tok::Lt: op = ExprOp::Lt; break;
        case Tok::Le: op = ExprOp::Le; break;
        case Tok::Gt: op = ExprOp::Gt; break;
        case Tok::Ge: op = ExprOp::Ge; break;
        default: return lhs;
    }
    Token t = ts.next();
    return make_binary(op, lhs, parse_additive(ts), t.pos);
}

ExprPtr parse_expression(TokenStream& ts) { return parse_ternary(ts); }

ExprPtr parse_expression_text(std::string_view text) {
    TokenStream ts(tokenize(text));
    auto e = parse_expression(ts);
    if (!ts.at(Tok::End)) ts.error("unexpected '" + ts.peek().text + "' after expression");
    return e;
}

ExprPtr make_literal(Value v, SourcePos pos) {
    auto e = node(ExprOp::Literal, pos);
    e->type = v.type;
    e->literal = std::move(v);
    return e;
}

ExprPtr make_binary(ExprOp op, ExprPtr a, ExprPtr b, SourcePos pos) {
    auto e = node(op, pos);
    e->args = {std::move(a), std::move(b)};
    return e;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

const char* op_symbol(ExprOp op) {
    switch (op) {
        case ExprOp::Add: return "+";
        case ExprOp::Sub: return "-";
        case ExprOp::Mul: return "*";
        case ExprOp::Div: return "/";
        case ExprOp::Eq: return "=";
        case ExprOp::Neq: return "!=";
        case ExprOp::Lt: return "<";
        case ExprOp::Le: return "<=";
        case ExprOp::Gt: return ">";
        case ExprOp::Ge: return ">=";
        case ExprOp::And: return "&";
        case ExprOp::Or: return "|";
        case ExprOp::Implies: return "=>";
        case ExprOp::Iff: return "<=>";
        default: return "?";
    }
}

bool is_atomic(const Expr& e) {
    return e.op == ExprOp::Literal || e.op == ExprOp::Ident || e.op == ExprOp::Var || e.op == ExprOp::Call;
}

std::string wrapped(const Expr& e) {
    std::string s = print_expression(e);
    if (is_atomic(e) && !(e.op == ExprOp::Literal && s[0] == '-')) return s;
    return "(" + s + ")";
}

}  // namespace

std::string print_expression(const Expr& e) {
    switch (e.op) {
        case ExprOp::Literal: return e.literal.text();
        case ExprOp::Ident: return e.quoted ? "\"" + e.name + "\"" : e.name;
        case ExprOp::Var: return e.name;
        case ExprOp::Neg: return "-" + wrapped(*e.args[0]);
        case ExprOp::Not: return "!" + wrapped(*e.args[0]);
        case ExprOp::Ite:
            return wrapped(*e.args[0]) + " ? " + wrapped(*e.args[1]) + " : " + wrapped(*e.args[2]);
        case ExprOp::Call: {
            std::string out = e.name + "(";
            for (std::size_t k = 0; k < e.args.size(); ++k) {
                if (k) out += ", ";
                out += print_expression(*e.args[k]);
            }
            return out + ")";
        }
        default:
            return wrapped(*e.args[0]) + op_symbol(e.op) + wrapped(*e.args[1]);
    }
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

bool numeric(ValueType t) { return t != ValueType::Bool; }

ValueType join_numeric(ValueType a, ValueType b) {
    if (a == ValueType::Real || b == ValueType::Real) return ValueType::Real;
    if (a == ValueType::Rat || b == ValueType::Rat) return ValueType::Rat;
    return ValueType::Int;
}

[[noreturn]] void type_error(const Expr& e, const std::string& msg) { fail(ErrorCode::Type, msg, e.pos); }

bool all_literal(const Expr& e) {
    for (auto& a : e.args)
        if (a->op != ExprOp::Literal) return false;
    return true;
}

}  // namespace

ExprPtr compile(const ExprPtr& src, const ExprScope& scope) {
    const Expr& e = *src;
    if (e.op == ExprOp::Literal) return src;
    if (e.op == ExprOp::Var) return src;
    if (e.op == ExprOp::Ident) {
        if (!e.quoted && scope.constants) {
            auto it = scope.constants->find(e.name);
            if (it != scope.constants->end()) return make_literal(it->second, e.pos);
        }
        if (!e.quoted && scope.variable) {
            if (auto v = scope.variable(e.name)) {
                auto out = node(ExprOp::Var, e.pos);
                out->name = e.name;
                out->slot = v->first;
                out->type = v->second;
                return out;
            }
        }
        fail(ErrorCode::UndeclaredSymbol, "unknown identifier '" + e.name + "'", e.pos);
    }

    auto out = node(e.op, e.pos);
    out->name = e.name;
    for (auto& a : e.args) out->args.push_back(compile(a, scope));
    auto arg_type = [&](std::size_t k) { return out->args[k]->type; };

    switch (e.op) {
        case ExprOp::Neg:
            if (!numeric(arg_type(0))) type_error(e, "unary minus applied to a boolean");
            out->type = arg_type(0);
            break;
        case ExprOp::Not:
            if (arg_type(0) != ValueType::Bool) type_error(e, "'!' applied to a number");
            out->type = ValueType::Bool;
            break;
        case ExprOp::Add:
        case ExprOp::Sub:
        case ExprOp::Mul:
            if (!numeric(arg_type(0)) || !numeric(arg_type(1))) type_error(e, "arithmetic on a boolean");
            out->type = join_numeric(arg_type(0), arg_type(1));
            break;
        case ExprOp::Div:
            if (!numeric(arg_type(0)) || !numeric(arg_type(1))) type_error(e, "arithmetic on a boolean");
            out->type = join_numeric(join_numeric(arg_type(0), arg_type(1)), ValueType::Rat);
            break;
        case ExprOp::Eq:
        case ExprOp::Neq:
            if (numeric(arg_type(0)) != numeric(arg_type(1))) type_error(e, "comparison of a boolean with a number");
            out->type = ValueType::Bool;
            break;
        case ExprOp::Lt:
        case ExprOp::Le:
        case ExprOp::Gt:
        case ExprOp::Ge:
            if (!numeric(arg_type(0)) || !numeric(arg_type(1))) type_error(e, "ordering comparison on a boolean");
            out->type = ValueType::Bool;
            break;
        case ExprOp::And:
        case ExprOp::Or:
        case ExprOp::Implies:
        case ExprOp::Iff:
            if (arg_type(0) != ValueType::Bool || arg_type(1) != ValueType::Bool)
                type_error(e, "boolean connective applied to a number");
            out->type = ValueType::Bool;
            break;
        case ExprOp::Ite:
            if (arg_type(0) != ValueType::Bool) type_error(e, "condition of '?' must be boolean");
            if (numeric(arg_type(1)) != numeric(arg_type(2))) type_error(e, "branches of '?' have different types");
            out->type = numeric(arg_type(1)) ? join_numeric(arg_type(1), arg_type(2)) : ValueType::Bool;
            break;
        case ExprOp::Call: {
            const std::string& f = e.name;
            std::size_t n = out->args.size();
            for (auto& a : out->args)
                if (!numeric(a->type)) type_error(e, "function '" + f + "' applied to a boolean");
            if (f == "min" || f == "max") {
                if (n < 1) type_error(e, f + " needs at least one argument");
                ValueType t = ValueType::Int;
                for (auto& a : out->args) t = join_numeric(t, a->type);
                out->type = t;
            } else if (f == "floor" || f == "ceil" || f == "round") {
                if (n != 1) type_error(e, f + " takes one argument");
                out->type = ValueType::Int;
            } else if (f == "pow") {
                if (n != 2) type_error(e, "pow takes two arguments");
                if (arg_type(1) != ValueType::Int) out->type = ValueType::Real;
                else out->type = arg_type(0) == ValueType::Real ? ValueType::Real : arg_type(0);
            } else if (f == "mod") {
                if (n != 2 || arg_type(0) != ValueType::Int || arg_type(1) != ValueType::Int)
                    type_error(e, "mod takes two integers");
                out->type = ValueType::Int;
            } else if (f == "log") {
                if (n != 2) type_error(e, "log takes two arguments (value, base)");
                out->type = ValueType::Real;
            } else {
                fail(ErrorCode::UndeclaredSymbol, "unknown function '" + f + "'", e.pos);
            }
            break;
        }
        default:
            break;
    }
    if (all_literal(*out)) return make_literal(eval_value(*out, {}), e.pos);
    return out;
}

ExprPtr rename(const ExprPtr& src, const std::map<std::string, std::string>& map) {
    auto out = std::make_shared<Expr>(*src);
    if (out->op == ExprOp::Ident && !out->quoted) {
        auto it = map.find(out->name);
        if (it != map.end()) out->name = it->second;
    }
    for (auto& a : out->args) a = rename(a, map);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

[[noreturn]] void eval_error(const Expr& e, const std::string& msg) { fail(ErrorCode::Type, msg, e.pos); }

std::int64_t checked_pow(std::int64_t base, std::int64_t exp, const Expr& e) {
    if (exp < 0) eval_error(e, "negative exponent in integer pow");
    std::int64_t r = 1;
    for (std::int64_t k = 0; k < exp; ++k) {
        if (__builtin_mul_overflow(r, base, &r)) eval_error(e, "integer overflow in pow");
    }
    return r;
}

int compare_numeric(const Expr& a, const Expr& b, Valuation vals) {
    if (a.type == ValueType::Int && b.type == ValueType::Int) {
        auto x = eval_int(a, vals), y = eval_int(b, vals);
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    if (a.type == ValueType::Real || b.type == ValueType::Real) {
        double x = eval_real(a, vals), y = eval_real(b, vals);
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    Rational x = eval_rational(a, vals), y = eval_rational(b, vals);
    return cmp(x, y) < 0 ? -1 : (cmp(x, y) > 0 ? 1 : 0);
}

}  // namespace

bool eval_bool(const Expr& e, Valuation vals) {
    switch (e.op) {
        case ExprOp::Literal: return e.literal.b;
        case ExprOp::Var: return vals[static_cast<std::size_t>(e.slot)] != 0;
        case ExprOp::Not: return !eval_bool(*e.args[0], vals);
        case ExprOp::And: return eval_bool(*e.args[0], vals) && eval_bool(*e.args[1], vals);
        case ExprOp::Or: return eval_bool(*e.args[0], vals) || eval_bool(*e.args[1], vals);
        case ExprOp::Implies: return !eval_bool(*e.args[0], vals) || eval_bool(*e.args[1], vals);
        case ExprOp::Iff: return eval_bool(*e.args[0], vals) == eval_bool(*e.args[1], vals);
        case ExprOp::Ite: return eval_bool(*e.args[0], vals) ? eval_bool(*e.args[1], vals) : eval_bool(*e.args[2], vals);
        case ExprOp::Eq:
        case ExprOp::Neq: {
            bool eq;
            if (e.args[0]->type == ValueType::Bool) eq = eval_bool(*e.args[0], vals) == eval_bool(*e.args[1], vals);
            else eq = compare_numeric(*e.args[0], *e.args[1], vals) == 0;
            return e.op == ExprOp::Eq ? eq : !eq;
        }
        case ExprOp::Lt: return compare_numeric(*e.args[0], *e.args[1], vals) < 0;
        case ExprOp::Le: return compare_numeric(*e.args[0], *e.args[1], vals) <= 0;
        case ExprOp::Gt: return compare_numeric(*e.args[0], *e.args[1], vals) > 0;
        case ExprOp::Ge: return compare_numeric(*e.args[0], *e.args[1], vals) >= 0;
        default: eval_error(e, "expression is not boolean");
    }
}

std::int64_t eval_int(const Expr& e, Valuation vals) {
    switch (e.op) {
        case ExprOp::Literal:
            if (e.literal.type == ValueType::Int) return e.literal.i;
            break;
        case ExprOp::Var: return vals[static_cast<std::size_t>(e.slot)];
        case ExprOp::Neg: return -eval_int(*e.args[0], vals);
        case ExprOp::Add: return eval_int(*e.args[0], vals) + eval_int(*e.args[1], vals);
        case ExprOp::Sub: return eval_int(*e.args[0], vals) - eval_int(*e.args[1], vals);
        case ExprOp::Mul: return eval_int(*e.args[0], vals) * eval_int(*e.args[1], vals);
        case ExprOp::Ite: return eval_bool(*e.args[0], vals) ? eval_int(*e.args[1], vals) : eval_int(*e.args[2], vals);
        case ExprOp::Call: {
            const std::string& f = e.name;
            if (f == "min" || f == "max") {
                std::int64_t r = eval_int(*e.args[0], vals);
                for (std::size_t k = 1; k < e.args.size(); ++k) {
                    auto v = eval_int(*e.args[k], vals);
                    r = f == "min" ? std::min(r, v) : std::max(r, v);
                }
                return r;
            }
            if (f == "mod") {
                auto a = eval_int(*e.args[0], vals), b = eval_int(*e.args[1], vals);
                if (b == 0) eval_error(e, "mod by zero");
                auto r = a % b;
                return r < 0 ? r + (b < 0 ? -b : b) : r;
            }
            if (f == "pow") return checked_pow(eval_int(*e.args[0], vals), eval_int(*e.args[1], vals), e);
            if (f == "floor" || f == "ceil" || f == "round") {
                const Expr& a = *e.args[0];
                if (a.type == ValueType::Int) return eval_int(a, vals);
                if (a.type == ValueType::Real) {
                    double d = eval_real(a, vals);
                    double r = f == "floor" ? std::floor(d) : f == "ceil" ? std::ceil(d) : std::floor(d + 0.5);
                    return static_cast<std::int64_t>(r);
                }
                Rational q = eval_rational(a, vals);
                mpz_class out;
                if (f == "floor") mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
                else if (f == "ceil") mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
                else {
                    Rational h = q + Rational(1, 2);
                    mpz_fdiv_q(out.get_mpz_t(), h.get_num_mpz_t(), h.get_den_mpz_t());
                }
                return out.get_si();
            }
            break;
        }
        default: break;
    }
    eval_error(e, "expression is not an integer");
}

Rational eval_rational(const Expr& e, Valuation vals) {
    if (e.type == ValueType::Int) return Rational(static_cast<long>(eval_int(e, vals)));
    if (e.type == ValueType::Real) return rational_from_double(eval_real(e, vals));
    switch (e.op) {
        case ExprOp::Literal: return e.literal.as_rational();
        case ExprOp::Neg: return -eval_rational(*e.args[0], vals);
        case ExprOp::Add: return eval_rational(*e.args[0], vals) + eval_rational(*e.args[1], vals);
        case ExprOp::Sub: return eval_rational(*e.args[0], vals) - eval_rational(*e.args[1], vals);
        case ExprOp::Mul: return eval_rational(*e.args[0], vals) * eval_rational(*e.args[1], vals);
        case ExprOp::Div: {
            Rational d = eval_rational(*e.args[1], vals);
            if (d == 0) eval_error(e, "division by zero");
            return eval_rational(*e.args[0], vals) / d;
        }
        case ExprOp::Ite:
            return eval_bool(*e.args[0], vals) ? eval_rational(*e.args[1], vals) : eval_rational(*e.args[2], vals);
        case ExprOp::Call: {
            const std::string& f = e.name;
            if (f == "min" || f == "max") {
                Rational r = eval_rational(*e.args[0], vals);
                for (std::size_t k = 1; k < e.args.size(); ++k) {
                    Rational v = eval_rational(*e.args[k], vals);
                    if (f == "min" ? v < r : v > r) r = v;
                }
                return r;
            }
            if (f == "pow") {
                Rational base = eval_rational(*e.args[0], vals);
                std::int64_t exp = eval_int(*e.args[1], vals);
                Rational r = 1;
                Rational b = exp < 0 ? Rational(1 / base) : base;
                if (exp < 0 && base == 0) eval_error(e, "division by zero in pow");
                for (std::int64_t k = 0; k < (exp < 0 ? -exp : exp); ++k) r *= b;
                return r;
            }
            break;
        }
        default: break;
    }
    eval_error(e, "expression is not numeric");
}

double eval_real(const Expr& e, Valuation vals) {
    if (e.type == ValueType::Int) return static_cast<double>(eval_int(e, vals));
    if (e.type == ValueType::Rat) return eval_rational(e, vals).get_d();
    switch (e.op) {
        case ExprOp::Literal: return e.literal.as_double();
        case ExprOp::Neg: return -eval_real(*e.args[0], vals);
        case ExprOp::Add: return eval_real(*e.args[0], vals) + eval_real(*e.args[1], vals);
        case ExprOp::Sub: return eval_real(*e.args[0], vals) - eval_real(*e.args[1], vals);
        case ExprOp::Mul: return eval_real(*e.args[0], vals) * eval_real(*e.args[1], vals);
        case ExprOp::Div: {
            double d = eval_real(*e.args[1], vals);
            if (d == 0) eval_error(e, "division by zero");
            return eval_real(*e.args[0], vals) / d;
        }
        case ExprOp::Ite: return eval_bool(*e.args[0], vals) ? eval_real(*e.args[1], vals) : eval_real(*e.args[2], vals);
        case ExprOp::Call: {
            const std::string& f = e.name;
            if (f == "min" || f == "max") {
                double r = eval_real(*e.args[0], vals);
                for (std::size_t k = 1; k < e.args.size(); ++k) {
                    double v = eval_real(*e.args[k], vals);
                    r = f == "min" ? std::min(r, v) : std::max(r, v);
                }
                return r;
            }
            if (f == "pow") return std::pow(eval_real(*e.args[0], vals), eval_real(*e.args[1], vals));
            if (f == "log") return std::log(eval_real(*e.args[0], vals)) / std::log(eval_real(*e.args[1], vals));
            break;
        }
        default: break;
    }
    eval_error(e, "expression is not numeric");
}

Value eval_value(const Expr& e, Valuation vals) {
    switch (e.type) {
        case ValueType::Bool: return Value::boolean(eval_bool(e, vals));
        case ValueType::Int: return Value::integer(eval_int(e, vals));
        case ValueType::Rat: return Value::rational(eval_rational(e, vals));
        case ValueType::Real: return Value::real(eval_real(e, vals));
    }
    return Value{};
}

bool involves_real(const Expr& e) {
    if (e.type == ValueType::Real) return true;
    for (auto& a : e.args)
        if (involves_real(*a)) return true;
    return false;
}

}  // namespace csgnash
