#include "csgnash/property.hpp"

#include <algorithm>
#include <sstream>

namespace csgnash {

bool Objective::finite_horizon() const {
    if (is_reward) return rho.op != RewardOp::Reach;
    return path.op != PathOp::Until;
}

const char* comparison_text(Comparison c) {
    switch (c) {
        case Comparison::Lt: return "<";
        case Comparison::Le: return "<=";
        case Comparison::Ge: return ">=";
        case Comparison::Gt: return ">";
    }
    return "?";
}

bool compare(const Rational& lhs, Comparison c, const Rational& rhs) {
    switch (c) {
        case Comparison::Lt: return lhs < rhs;
        case Comparison::Le: return lhs <= rhs;
        case Comparison::Ge: return lhs >= rhs;
        case Comparison::Gt: return lhs > rhs;
    }
    return false;
}

bool compare(double lhs, Comparison c, double rhs) {
    switch (c) {
        case Comparison::Lt: return lhs < rhs;
        case Comparison::Le: return lhs <= rhs;
        case Comparison::Ge: return lhs >= rhs;
        case Comparison::Gt: return lhs > rhs;
    }
    return false;
}

NashQuery nash_query(const Formula& f) {
    if (f.kind != FormulaKind::Nash) fail(ErrorCode::InvalidArgument, "formula is not a Nash formula");
    return NashQuery{f.coalition, f.others, f.objective[0], f.objective[1], f.threshold};
}

Horizon classify_horizon(const NashQuery& q) {
    bool a = q.first.finite_horizon(), b = q.second.finite_horizon();
    if (a && b) return Horizon::BothFinite;
    if (!a && !b) return Horizon::BothInfinite;
    return a ? Horizon::FirstFinite : Horizon::SecondFinite;
}

const char* horizon_name(Horizon h) {
    switch (h) {
        case Horizon::BothFinite: return "both-finite";
        case Horizon::BothInfinite: return "both-infinite";
        case Horizon::FirstFinite: return "mixed(first finite)";
        case Horizon::SecondFinite: return "mixed(second finite)";
    }
    return "?";
}

namespace {

std::shared_ptr<Formula> make(FormulaKind k) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    return f;
}

bool continues_expression(Tok t) {
    switch (t) {
        case Tok::Plus: case Tok::Minus: case Tok::Star: case Tok::Slash:
        case Tok::Eq: case Tok::Neq: case Tok::Lt: case Tok::Le: case Tok::Gt: case Tok::Ge:
        case Tok::LParen: case Tok::Question:
            return true;
        default:
            return false;
    }
}

class PropertyParser {
public:
    PropertyParser(std::string_view text, const PropertyContext& ctx) : ts_(tokenize(text)), ctx_(ctx) {
        if (!ctx_.game) fail(ErrorCode::InvalidArgument, "property parsing needs a game");
        scope_.constants = ctx_.constants;
        const auto& vars = ctx_.game->variables();
        scope_.variable = [&vars](const std::string& name) -> std::optional<std::pair<int, ValueType>> {
            for (std::size_t k = 0; k < vars.size(); ++k)
                if (vars[k].name == name) return std::make_pair(static_cast<int>(k), vars[k].is_bool ? ValueType::Bool : ValueType::Int);
            return std::nullopt;
        };
    }

    FormulaPtr parse() {
        auto f = formula();
        if (!ts_.at(Tok::End)) ts_.error("unexpected '" + ts_.peek().text + "' after property");
        return f;
    }

private:
    FormulaPtr binary(FormulaKind k, FormulaPtr a, FormulaPtr b) {
        auto f = make(k);
        f->args = {std::move(a), std::move(b)};
        return f;
    }

    FormulaPtr formula() {
        auto lhs = implies();
        while (ts_.accept(Tok::Iff)) lhs = binary(FormulaKind::Iff, lhs, implies());
        return lhs;
    }

    FormulaPtr implies() {
        auto lhs = disjunction();
        if (ts_.accept(Tok::Implies)) return binary(FormulaKind::Implies, lhs, implies());
        return lhs;
    }

    FormulaPtr disjunction() {
        auto lhs = conjunction();
        while (ts_.accept(Tok::Or)) lhs = binary(FormulaKind::Or, lhs, conjunction());
        return lhs;
    }

    FormulaPtr conjunction() {
        auto lhs = negation();
        while (ts_.accept(Tok::And)) lhs = binary(FormulaKind::And, lhs, negation());
        return lhs;
    }

    FormulaPtr negation() {
        if (ts_.accept(Tok::Not)) {
            auto f = make(FormulaKind::Not);
            f->args = {negation()};
            return f;
        }
        return atom();
    }

    FormulaPtr expression_atom() {
        SourcePos pos = ts_.peek().pos;
        auto raw = parse_relational(ts_);
        auto e = compile(raw, scope_);
        if (e->type != ValueType::Bool)
            fail(ErrorCode::Type, "'" + print_expression(*raw) + "' is not a state predicate", pos);
        if (e->op == ExprOp::Literal) return make(e->literal.b ? FormulaKind::True : FormulaKind::False);
        auto f = make(FormulaKind::Expression);
        f->expr = e;
        return f;
    }

    FormulaPtr atom() {
        const Token& t = ts_.peek();
        if (t.kind == Tok::String) {
            Token tok = ts_.next();
            if (!ctx_.game->label(tok.text) && tok.text != "init")
                fail(ErrorCode::UndeclaredSymbol, "unknown label \"" + tok.text + "\"", tok.pos);
            auto f = make(FormulaKind::Label);
            f->label = tok.text;
            return f;
        }
        if (t.kind == Tok::CoalOpen) return coalition_operator();
        if (t.kind == Tok::LParen) {
            std::size_t start = ts_.position();
            try {
                ts_.next();
                auto f = formula();
                ts_.expect(Tok::RParen);
                return f;
            } catch (const Error& first) {
                ts_.rewind(start);
                try {
                    return expression_atom();
                } catch (const Error&) {
                    throw first;
                }
            }
        }
        if (t.kind == Tok::Ident) {
            if (t.text == "true" && !continues_expression(ts_.peek(1).kind)) {
                ts_.next();
                return make(FormulaKind::True);
            }
            if (t.text == "false" && !continues_expression(ts_.peek(1).kind)) {
                ts_.next();
                return make(FormulaKind::False);
            }
            if (ctx_.game->label(t.text) && !continues_expression(ts_.peek(1).kind)) {
                auto f = make(FormulaKind::Label);
                f->label = ts_.next().text;
                return f;
            }
        }
        return expression_atom();
    }

    std::vector<PlayerId> coalition() {
        std::vector<PlayerId> out;
        auto one = [&]() {
            const Token& t = ts_.peek();
            if (t.kind == Tok::Int) {
                Token tok = ts_.next();
                long k = std::stol(tok.text);
                if (k < 1 || static_cast<std::size_t>(k) > ctx_.game->num_players())
                    fail(ErrorCode::UnknownPlayer, "no player " + tok.text, tok.pos);
                out.push_back(static_cast<PlayerId>(k - 1));
                return;
            }
            Token tok = ts_.expect(Tok::Ident, "player name");
            auto p = ctx_.game->find_player(tok.text);
            if (!p) fail(ErrorCode::UnknownPlayer, "unknown player '" + tok.text + "'", tok.pos);
            out.push_back(*p);
        };
        auto list = [&](Tok close) {
            if (ts_.at(close)) return;
            do {
                one();
            } while (ts_.accept(Tok::Comma));
        };
        if (ts_.accept(Tok::LBrace)) {
            list(Tok::RBrace);
            ts_.expect(Tok::RBrace);
        } else if (!ts_.at(Tok::Colon) && !ts_.at(Tok::CoalClose)) {
            do {
                if (ts_.accept(Tok::LBrace)) {
                    list(Tok::RBrace);
                    ts_.expect(Tok::RBrace);
                } else {
                    one();
                }
            } while (ts_.accept(Tok::Comma));
        }
        return out;
    }

    static std::vector<PlayerId> normalised(std::vector<PlayerId> c, SourcePos pos) {
        std::sort(c.begin(), c.end());
        if (std::adjacent_find(c.begin(), c.end()) != c.end())
            fail(ErrorCode::CoalitionNotPartition, "a player appears twice in a coalition", pos);
        return c;
    }

    Rational number(const char* what) {
        SourcePos pos = ts_.peek().pos;
        auto raw = parse_relational(ts_);
        auto e = compile(raw, ExprScope{ctx_.constants, {}});
        if (e->op != ExprOp::Literal || e->type == ValueType::Bool)
            fail(ErrorCode::BadThreshold, std::string(what) + " must be a constant number", pos);
        return e->literal.as_rational();
    }

    std::size_t bound() {
        const Token& t = ts_.peek();
        SourcePos pos = t.pos;
        if (t.kind == Tok::Int) return std::stoul(ts_.next().text);
        if (t.kind == Tok::Ident) {
            Token tok = ts_.next();
            if (ctx_.constants) {
                auto it = ctx_.constants->find(tok.text);
                if (it != ctx_.constants->end()) {
                    if (it->second.type != ValueType::Int || it->second.i < 0)
                        fail(ErrorCode::Type, "bound '" + tok.text + "' must be a nonnegative integer", pos);
                    return static_cast<std::size_t>(it->second.i);
                }
            }
            fail(ErrorCode::UndefinedConstant, "unknown bound '" + tok.text + "'", pos);
        }
        ts_.error("expected a step bound");
    }

    std::optional<Comparison> comparison() {
        switch (ts_.peek().kind) {
            case Tok::Lt: ts_.next(); return Comparison::Lt;
            case Tok::Le: ts_.next(); return Comparison::Le;
            case Tok::Gt: ts_.next(); return Comparison::Gt;
            case Tok::Ge: ts_.next(); return Comparison::Ge;
            default: return std::nullopt;
        }
    }

    PathFormula path() {
        PathFormula p;
        if (ts_.accept_word("X")) {
            p.op = PathOp::Next;
            p.right = negation_level();
            return p;
        }
        if (ts_.accept_word("F")) {
            p.eventually = true;
            p.left = make(FormulaKind::True);
            p.op = PathOp::Until;
            if (ts_.accept(Tok::Le)) {
                p.op = PathOp::BoundedUntil;
                p.bound = bound();
            }
            p.right = negation_level();
            return p;
        }
        p.left = negation_level();
        ts_.expect_word("U");
        p.op = PathOp::Until;
        if (ts_.accept(Tok::Le)) {
            p.op = PathOp::BoundedUntil;
            p.bound = bound();
        }
        p.right = negation_level();
        return p;
    }

    // Operands of temporal operators bind tighter than connectives unless
    // parenthesised, except that a full formula is accepted before ']'.
    FormulaPtr negation_level() { return formula(); }

    RewardFormula reward_path() {
        RewardFormula r;
        if (ts_.accept_word("I")) {
            ts_.expect(Tok::Eq);
            r.op = RewardOp::Instant;
            r.bound = bound();
        } else if (ts_.accept_word("C")) {
            ts_.expect(Tok::Le);
            r.op = RewardOp::Cumulative;
            r.bound = bound();
        } else if (ts_.accept_word("F")) {
            r.op = RewardOp::Reach;
            r.target = formula();
        } else {
            ts_.error("expected I=k, C<=k or F in a reward objective");
        }
        return r;
    }

    std::pair<std::string, std::size_t> reward_name() {
        ts_.expect(Tok::LBrace);
        const Token& t = ts_.peek();
        SourcePos pos = t.pos;
        std::string name;
        if (t.kind == Tok::String || t.kind == Tok::Ident) name = ts_.next().text;
        else ts_.error("expected a reward structure name");
        ts_.expect(Tok::RBrace);
        auto r = ctx_.game->find_reward(name);
        if (!r) fail(ErrorCode::UnknownReward, "unknown reward structure \"" + name + "\"", pos);
        return {name, *r};
    }

    Objective objective() {
        Objective o;
        if (ts_.accept_word("P")) {
            ts_.expect(Tok::LBrack);
            o.path = path();
            ts_.expect(Tok::RBrack);
        } else if (ts_.accept_word("R")) {
            o.is_reward = true;
            std::tie(o.reward, o.reward_index) = reward_name();
            ts_.expect(Tok::LBrack);
            o.rho = reward_path();
            ts_.expect(Tok::RBrack);
        } else {
            ts_.error("expected P[...] or R{\"r\"}[...]");
        }
        return o;
    }

    // max=? or min=? after an operator letter; returns true when minimising.
    bool query_mode(std::shared_ptr<Formula>& f, bool allow_min, bool probability) {
        SourcePos pos = ts_.peek().pos;
        if (ts_.at_word("max") || ts_.at_word("min")) {
            bool min = ts_.next().text == "min";
            if (min && !allow_min) fail(ErrorCode::Syntax, "Nash formulae only support max=?", pos);
            ts_.expect(Tok::Eq);
            ts_.expect(Tok::Question);
            return min;
        }
        if (ts_.at(Tok::Eq) && ts_.peek(1).kind == Tok::Question) {
            ts_.next();
            ts_.next();
            return false;
        }
        auto c = comparison();
        if (!c) ts_.error("expected max=?, min=? or a comparison");
        Rational x = number("threshold");
        if (probability && (x < 0 || x > 1))
            fail(ErrorCode::BadThreshold, "probability threshold " + to_string(x) + " is outside [0,1]", pos);
        f->threshold = Threshold{*c, x};
        return false;
    }

    FormulaPtr coalition_operator() {
        SourcePos pos = ts_.next().pos;
        auto first = coalition();
        if (ts_.accept(Tok::Colon)) {
            auto second = coalition();
            ts_.expect(Tok::CoalClose);
            auto f = make(FormulaKind::Nash);
            f->coalition = normalised(first, pos);
            f->others = normalised(second, pos);
            if (f->coalition.empty() || f->others.empty())
                fail(ErrorCode::CoalitionNotPartition, "both coalitions of a Nash formula must be nonempty", pos);
            std::vector<PlayerId> all;
            std::merge(f->coalition.begin(), f->coalition.end(), f->others.begin(), f->others.end(), std::back_inserter(all));
            if (std::adjacent_find(all.begin(), all.end()) != all.end())
                fail(ErrorCode::CoalitionNotPartition, "the coalitions of a Nash formula overlap", pos);
            if (all.size() != ctx_.game->num_players())
                fail(ErrorCode::CoalitionNotPartition, "the coalitions of a Nash formula must cover all players", pos);
            query_mode(f, false, false);
            Tok close = Tok::End;
            if (ts_.accept(Tok::LParen)) close = Tok::RParen;
            else if (ts_.accept(Tok::LBrack)) close = Tok::RBrack;
            SourcePos at = ts_.peek().pos;
            f->objective[0] = objective();
            ts_.expect(Tok::Plus);
            f->objective[1] = objective();
            if (f->objective[0].is_reward != f->objective[1].is_reward)
                fail(ErrorCode::Syntax, "a Nash formula cannot mix probability and reward objectives", at);
            if (close != Tok::End) ts_.expect(close);
            return f;
        }
        ts_.expect(Tok::CoalClose);
        auto coal = normalised(first, pos);
        const Token& op = ts_.peek();
        if (op.kind != Tok::Ident) ts_.error("expected P or R after a coalition");
        std::string word = op.text;
        std::shared_ptr<Formula> f;
        if (word == "P" || word == "Pmax" || word == "Pmin") {
            ts_.next();
            f = make(FormulaKind::Prob);
            f->coalition = coal;
            if (word == "P") {
                f->minimise = query_mode(f, true, true);
            } else {
                ts_.expect(Tok::Eq);
                ts_.expect(Tok::Question);
                f->minimise = word == "Pmin";
            }
            ts_.expect(Tok::LBrack);
            f->objective[0].path = path();
            ts_.expect(Tok::RBrack);
        } else if (word == "R" || word == "Rmax" || word == "Rmin") {
            ts_.next();
            f = make(FormulaKind::Reward);
            f->coalition = coal;
            f->objective[0].is_reward = true;
            if (ts_.at(Tok::LBrace)) std::tie(f->objective[0].reward, f->objective[0].reward_index) = reward_name();
            else ts_.error("expected {\"reward\"} after R");
            if (word == "R") {
                f->minimise = query_mode(f, true, false);
            } else {
                ts_.expect(Tok::Eq);
                ts_.expect(Tok::Question);
                f->minimise = word == "Rmin";
            }
            ts_.expect(Tok::LBrack);
            f->objective[0].rho = reward_path();
            ts_.expect(Tok::RBrack);
        } else {
            ts_.error("expected P or R after a coalition");
        }
        return f;
    }

    TokenStream ts_;
    const PropertyContext& ctx_;
    ExprScope scope_;
};

std::string number_text(const Rational& q) { return Value::rational(q).text(); }

std::string coalition_text(const std::vector<PlayerId>& c, const Csg& g) {
    if (c.size() == 1) return g.player_name(c[0]);
    std::string out = "{";
    for (std::size_t k = 0; k < c.size(); ++k) out += (k ? "," : "") + g.player_name(c[k]);
    return out + "}";
}

std::string wrap(const Formula& f, const Csg& g) { return "(" + print_formula(f, g) + ")"; }

std::string path_text(const PathFormula& p, const Csg& g) {
    std::string bound = p.op == PathOp::BoundedUntil ? "<=" + std::to_string(p.bound) : "";
    if (p.op == PathOp::Next) return "X " + wrap(*p.right, g);
    if (p.eventually) return "F" + bound + " " + wrap(*p.right, g);
    return wrap(*p.left, g) + " U" + bound + " " + wrap(*p.right, g);
}

std::string rho_text(const RewardFormula& r, const Csg& g) {
    switch (r.op) {
        case RewardOp::Instant: return "I=" + std::to_string(r.bound);
        case RewardOp::Cumulative: return "C<=" + std::to_string(r.bound);
        case RewardOp::Reach: return "F " + wrap(*r.target, g);
    }
    return "?";
}

std::string objective_text(const Objective& o, const Csg& g) {
    if (o.is_reward) return "R{\"" + o.reward + "\"}[" + rho_text(o.rho, g) + "]";
    return "P[" + path_text(o.path, g) + "]";
}

std::string mode_text(const Formula& f) {
    if (!f.threshold) return f.minimise ? "min=?" : "max=?";
    return std::string(comparison_text(f.threshold->cmp)) + number_text(f.threshold->value);
}

bool path_equal(const PathFormula& a, const PathFormula& b);

bool ptr_equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (!a || !b) return !a && !b;
    return formula_equal(*a, *b);
}

bool path_equal(const PathFormula& a, const PathFormula& b) {
    return a.op == b.op && a.bound == b.bound && a.eventually == b.eventually && ptr_equal(a.left, b.left) &&
           ptr_equal(a.right, b.right);
}

bool objective_equal(const Objective& a, const Objective& b) {
    if (a.is_reward != b.is_reward) return false;
    if (a.is_reward)
        return a.reward == b.reward && a.rho.op == b.rho.op && a.rho.bound == b.rho.bound &&
               ptr_equal(a.rho.target, b.rho.target);
    return path_equal(a.path, b.path);
}

}  // namespace

FormulaPtr parse_property(std::string_view text, const PropertyContext& ctx) { return PropertyParser(text, ctx).parse(); }

std::vector<std::string> split_property_file(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (auto c = line.find("//"); c != std::string::npos) line.resize(c);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        out.push_back(line.substr(first, last - first + 1));
    }
    return out;
}

std::string print_formula(const Formula& f, const Csg& g) {
    switch (f.kind) {
        case FormulaKind::True: return "true";
        case FormulaKind::False: return "false";
        case FormulaKind::Label: return "\"" + f.label + "\"";
        case FormulaKind::Expression: return "(" + print_expression(*f.expr) + ")";
        case FormulaKind::Not: return "!" + wrap(*f.args[0], g);
        case FormulaKind::And: return wrap(*f.args[0], g) + " & " + wrap(*f.args[1], g);
        case FormulaKind::Or: return wrap(*f.args[0], g) + " | " + wrap(*f.args[1], g);
        case FormulaKind::Implies: return wrap(*f.args[0], g) + " => " + wrap(*f.args[1], g);
        case FormulaKind::Iff: return wrap(*f.args[0], g) + " <=> " + wrap(*f.args[1], g);
        case FormulaKind::Prob:
            return "<<" + (f.coalition.empty() ? std::string() : coalition_text(f.coalition, g)) + ">> P " + mode_text(f) +
                   " [" + path_text(f.objective[0].path, g) + "]";
        case FormulaKind::Reward:
            return "<<" + (f.coalition.empty() ? std::string() : coalition_text(f.coalition, g)) + ">> R{\"" +
                   f.objective[0].reward + "\"} " + mode_text(f) + " [" + rho_text(f.objective[0].rho, g) + "]";
        case FormulaKind::Nash:
            return "<<" + coalition_text(f.coalition, g) + ":" + coalition_text(f.others, g) + ">> " + mode_text(f) +
                   " (" + objective_text(f.objective[0], g) + " + " + objective_text(f.objective[1], g) + ")";
    }
    return "?";
}

bool formula_equal(const Formula& a, const Formula& b) {
    if (a.kind != b.kind || a.label != b.label || a.minimise != b.minimise) return false;
    if ((a.expr == nullptr) != (b.expr == nullptr)) return false;
    if (a.expr && print_expression(*a.expr) != print_expression(*b.expr)) return false;
    if (a.args.size() != b.args.size()) return false;
    for (std::size_t k = 0; k < a.args.size(); ++k)
        if (!formula_equal(*a.args[k], *b.args[k])) return false;
    if (a.coalition != b.coalition || a.others != b.others) return false;
    if (a.threshold.has_value() != b.threshold.has_value()) return false;
    if (a.threshold && (a.threshold->cmp != b.threshold->cmp || a.threshold->value != b.threshold->value)) return false;
    int objectives = a.kind == FormulaKind::Nash ? 2 : (a.kind == FormulaKind::Prob || a.kind == FormulaKind::Reward ? 1 : 0);
    for (int k = 0; k < objectives; ++k)
        if (!objective_equal(a.objective[k], b.objective[k])) return false;
    return true;
}

}  // namespace csgnash
