#include <algorithm>
#include <set>

#include "csgnash/model_language.hpp"

namespace csgnash {

namespace {

bool is_reserved(const std::string& w) {
    static const std::set<std::string> words = {
        "csg", "player", "endplayer", "const", "int", "double", "bool", "module", "endmodule", "rewards",
        "endrewards", "label", "init", "true", "false", "global", "formula", "min", "max", "floor", "ceil",
        "pow", "mod", "log",
    };
    return words.count(w) > 0;
}

class ModelParser {
public:
    explicit ModelParser(std::string_view text) : ts_(tokenize(text)) {}

    ModelAst parse() {
        ts_.accept_word("csg");
        while (!ts_.at(Tok::End)) {
            if (ts_.at_word("player")) parse_player();
            else if (ts_.at_word("const")) parse_constant();
            else if (ts_.at_word("module")) parse_module();
            else if (ts_.at_word("rewards")) parse_rewards();
            else if (ts_.at_word("label")) parse_label();
            else if (ts_.at_word("global") || ts_.at_word("formula"))
                fail(ErrorCode::Syntax, "'" + ts_.peek().text + "' declarations are not supported", ts_.peek().pos);
            else ts_.error("expected a declaration, found '" + ts_.peek().text + "'");
        }
        if (ast_.modules.empty()) fail(ErrorCode::Syntax, "model declares no modules", ts_.peek().pos);
        if (ast_.players.empty()) fail(ErrorCode::Syntax, "model declares no players", ts_.peek().pos);
        check_names();
        infer_ownership();
        return std::move(ast_);
    }

private:
    std::string identifier(const char* what) {
        Token t = ts_.expect(Tok::Ident, what);
        if (is_reserved(t.text)) fail(ErrorCode::Syntax, "'" + t.text + "' is a reserved word", t.pos);
        return t.text;
    }

    void parse_player() {
        PlayerDecl p;
        p.pos = ts_.next().pos;
        p.name = identifier("player name");
        while (!ts_.accept_word("endplayer")) {
            if (ts_.accept(Tok::LBrack)) {
                p.actions.push_back(identifier("action name"));
                ts_.expect(Tok::RBrack);
            } else {
                p.modules.push_back(identifier("module name"));
            }
            ts_.accept(Tok::Comma);
            if (ts_.at(Tok::End)) ts_.error("missing 'endplayer'");
        }
        ast_.players.push_back(std::move(p));
    }

    void parse_constant() {
        ConstantDecl c;
        c.pos = ts_.next().pos;
        if (ts_.accept_word("int")) c.type = ValueType::Int;
        else if (ts_.accept_word("double")) c.type = ValueType::Rat;
        else if (ts_.accept_word("bool")) c.type = ValueType::Bool;
        c.name = identifier("constant name");
        if (ts_.accept(Tok::Eq)) c.value = parse_expression(ts_);
        ts_.expect(Tok::Semi);
        ast_.constants.push_back(std::move(c));
    }

    std::vector<std::string> action_list() {
        std::vector<std::string> out;
        ts_.expect(Tok::LBrack);
        if (!ts_.at(Tok::RBrack)) {
            do {
                out.push_back(identifier("action name"));
            } while (ts_.accept(Tok::Comma));
        }
        ts_.expect(Tok::RBrack);
        return out;
    }

    void parse_module() {
        SourcePos pos = ts_.next().pos;
        std::string name = identifier("module name");
        if (ts_.accept(Tok::Eq)) {
            std::string source = identifier("module name");
            auto it = std::find_if(ast_.modules.begin(), ast_.modules.end(),
                                   [&](const ModuleDecl& m) { return m.name == source; });
            if (it == ast_.modules.end())
                fail(ErrorCode::UndeclaredSymbol, "unknown module '" + source + "'", ts_.peek().pos);
            std::map<std::string, std::string> map;
            ts_.expect(Tok::LBrack);
            do {
                SourcePos at = ts_.peek().pos;
                std::string from = identifier("name");
                ts_.expect(Tok::Eq);
                std::string to = identifier("name");
                if (!map.emplace(from, to).second) fail(ErrorCode::Syntax, "'" + from + "' renamed twice", at);
            } while (ts_.accept(Tok::Comma));
            ts_.expect(Tok::RBrack);
            ts_.expect_word("endmodule");
            ast_.modules.push_back(renamed(*it, name, map, pos));
            return;
        }
        ModuleDecl m;
        m.name = name;
        m.pos = pos;
        while (!ts_.accept_word("endmodule")) {
            if (ts_.at(Tok::LBrack)) m.commands.push_back(parse_command());
            else if (ts_.at(Tok::Ident)) m.variables.push_back(parse_variable());
            else ts_.error("expected a variable or command, found '" + ts_.peek().text + "'");
        }
        ast_.modules.push_back(std::move(m));
    }

    VariableDecl parse_variable() {
        VariableDecl v;
        v.pos = ts_.peek().pos;
        v.name = identifier("variable name");
        ts_.expect(Tok::Colon);
        if (ts_.accept_word("bool")) {
            v.is_bool = true;
        } else {
            ts_.expect(Tok::LBrack);
            v.low = parse_expression(ts_);
            ts_.expect(Tok::DotDot);
            v.high = parse_expression(ts_);
            ts_.expect(Tok::RBrack);
        }
        if (ts_.accept_word("init")) v.init = parse_expression(ts_);
        ts_.expect(Tok::Semi);
        return v;
    }

    bool at_assignment() const {
        return ts_.at(Tok::LParen) && ts_.peek(1).kind == Tok::Ident && ts_.peek(2).kind == Tok::Prime;
    }

    std::vector<Assignment> parse_assignments() {
        std::vector<Assignment> out;
        if (ts_.at_word("true") && (ts_.peek(1).kind == Tok::Semi || ts_.peek(1).kind == Tok::Plus)) {
            ts_.next();
            return out;
        }
        do {
            if (!at_assignment()) ts_.error("expected an assignment (x'=e) or 'true'");
            Assignment a;
            a.pos = ts_.next().pos;
            a.variable = identifier("variable name");
            ts_.expect(Tok::Prime);
            ts_.expect(Tok::Eq);
            a.value = parse_expression(ts_);
            ts_.expect(Tok::RParen);
            out.push_back(std::move(a));
        } while (ts_.accept(Tok::And));
        return out;
    }

    Command parse_command() {
        Command c;
        c.pos = ts_.peek().pos;
        c.actions = action_list();
        if (c.actions.empty())
            fail(ErrorCode::Syntax, "commands must carry an action label", c.pos);
        c.guard = parse_expression(ts_);
        ts_.expect(Tok::Arrow);
        do {
            UpdateAlternative u;
            bool bare = at_assignment() ||
                        (ts_.at_word("true") && (ts_.peek(1).kind == Tok::Semi || ts_.peek(1).kind == Tok::Plus));
            if (!bare) {
                u.probability = parse_expression(ts_);
                ts_.expect(Tok::Colon);
            }
            u.assignments = parse_assignments();
            c.updates.push_back(std::move(u));
        } while (ts_.accept(Tok::Plus));
        ts_.expect(Tok::Semi);
        if (c.updates.size() > 1)
            for (auto& u : c.updates)
                if (!u.probability) fail(ErrorCode::Syntax, "every alternative of a probabilistic update needs a probability", c.pos);
        return c;
    }

    void parse_rewards() {
        RewardDecl r;
        r.pos = ts_.next().pos;
        r.name = ts_.expect(Tok::String, "reward name").text;
        while (!ts_.accept_word("endrewards")) {
            RewardItem item;
            item.pos = ts_.peek().pos;
            if (ts_.at(Tok::LBrack)) item.actions = action_list();
            item.guard = parse_expression(ts_);
            ts_.expect(Tok::Colon);
            item.value = parse_expression(ts_);
            ts_.expect(Tok::Semi);
            r.items.push_back(std::move(item));
            if (ts_.at(Tok::End)) ts_.error("missing 'endrewards'");
        }
        for (auto& other : ast_.rewards)
            if (other.name == r.name) fail(ErrorCode::Syntax, "reward structure \"" + r.name + "\" declared twice", r.pos);
        ast_.rewards.push_back(std::move(r));
    }

    void parse_label() {
        LabelDecl l;
        l.pos = ts_.next().pos;
        l.name = ts_.expect(Tok::String, "label name").text;
        ts_.expect(Tok::Eq);
        l.predicate = parse_expression(ts_);
        ts_.expect(Tok::Semi);
        for (auto& other : ast_.labels)
            if (other.name == l.name) fail(ErrorCode::Syntax, "label \"" + l.name + "\" declared twice", l.pos);
        ast_.labels.push_back(std::move(l));
    }

    static ModuleDecl renamed(const ModuleDecl& src, const std::string& name,
                              const std::map<std::string, std::string>& map, SourcePos pos) {
        auto sub = [&](const std::string& s) {
            auto it = map.find(s);
            return it == map.end() ? s : it->second;
        };
        auto sub_expr = [&](const ExprPtr& e) { return e ? rename(e, map) : e; };
        ModuleDecl m;
        m.name = name;
        m.pos = pos;
        for (auto v : src.variables) {
            v.name = sub(v.name);
            v.low = sub_expr(v.low);
            v.high = sub_expr(v.high);
            v.init = sub_expr(v.init);
            m.variables.push_back(std::move(v));
        }
        for (auto c : src.commands) {
            for (auto& a : c.actions) a = sub(a);
            c.guard = sub_expr(c.guard);
            for (auto& u : c.updates) {
                u.probability = sub_expr(u.probability);
                for (auto& a : u.assignments) {
                    a.variable = sub(a.variable);
                    a.value = sub_expr(a.value);
                }
            }
            m.commands.push_back(std::move(c));
        }
        return m;
    }

    void check_names() {
        std::set<std::string> globals;
        for (auto& c : ast_.constants)
            if (!globals.insert(c.name).second) fail(ErrorCode::Syntax, "'" + c.name + "' declared twice", c.pos);
        std::set<std::string> modules;
        for (auto& m : ast_.modules) {
            if (!modules.insert(m.name).second) fail(ErrorCode::Syntax, "module '" + m.name + "' declared twice", m.pos);
            std::set<std::string> own;
            for (auto& v : m.variables) {
                if (!globals.insert(v.name).second) fail(ErrorCode::Syntax, "'" + v.name + "' declared twice", v.pos);
                own.insert(v.name);
            }
            for (auto& c : m.commands)
                for (auto& u : c.updates) {
                    std::set<std::string> written;
                    for (auto& a : u.assignments) {
                        if (!own.count(a.variable)) {
                            ErrorCode code = globals.count(a.variable) ? ErrorCode::Syntax : ErrorCode::UndeclaredSymbol;
                            fail(code, "module '" + m.name + "' cannot write '" + a.variable + "'", a.pos);
                        }
                        if (!written.insert(a.variable).second)
                            fail(ErrorCode::Syntax, "'" + a.variable + "' assigned twice in one update", a.pos);
                    }
                }
        }
        std::set<std::string> players;
        for (auto& p : ast_.players)
            if (!players.insert(p.name).second) fail(ErrorCode::Syntax, "player '" + p.name + "' declared twice", p.pos);
    }

    void infer_ownership() {
        const auto& players = ast_.players;
        std::map<std::string, std::size_t> module_owner;
        for (std::size_t p = 0; p < players.size(); ++p) {
            for (auto& m : players[p].modules) {
                auto it = std::find_if(ast_.modules.begin(), ast_.modules.end(),
                                       [&](const ModuleDecl& d) { return d.name == m; });
                if (it == ast_.modules.end())
                    fail(ErrorCode::UndeclaredSymbol, "player '" + players[p].name + "' lists unknown module '" + m + "'",
                         players[p].pos);
                if (!module_owner.emplace(m, p).second)
                    fail(ErrorCode::AlphabetViolation, "module '" + m + "' belongs to two players", players[p].pos);
            }
        }
        for (auto& m : ast_.modules)
            if (!module_owner.count(m.name))
                fail(ErrorCode::AlphabetViolation, "module '" + m.name + "' is not assigned to a player", m.pos);

        auto& owner = ast_.action_owner;
        auto assign = [&](const std::string& a, std::size_t p, SourcePos pos) {
            auto [it, fresh] = owner.emplace(a, p);
            if (!fresh && it->second != p)
                fail(ErrorCode::AlphabetViolation,
                     "action '" + a + "' used by players '" + players[it->second].name + "' and '" + players[p].name + "'",
                     pos);
            return fresh;
        };
        for (std::size_t p = 0; p < players.size(); ++p)
            for (auto& a : players[p].actions) assign(a, p, players[p].pos);
        for (auto& m : ast_.modules)
            for (auto& c : m.commands)
                if (c.actions.size() == 1) assign(c.actions[0], module_owner[m.name], c.pos);

        bool changed = true;
        while (changed) {
            changed = false;
            for (auto& m : ast_.modules) {
                std::size_t p = module_owner[m.name];
                for (auto& c : m.commands) {
                    if (c.actions.size() < 2) continue;
                    std::vector<std::string> unknown;
                    bool has_own = false;
                    for (auto& a : c.actions) {
                        auto it = owner.find(a);
                        if (it == owner.end()) unknown.push_back(a);
                        else if (it->second == p) has_own = true;
                    }
                    if (unknown.size() == 1 && !has_own) changed |= assign(unknown[0], p, c.pos);
                }
            }
        }

        for (auto& m : ast_.modules) {
            std::size_t p = module_owner[m.name];
            for (auto& c : m.commands) {
                std::set<std::size_t> seen;
                std::size_t own = 0;
                for (auto& a : c.actions) {
                    auto it = owner.find(a);
                    if (it == owner.end())
                        fail(ErrorCode::AlphabetViolation, "cannot determine which player owns action '" + a + "'", c.pos);
                    if (!seen.insert(it->second).second)
                        fail(ErrorCode::AlphabetViolation, "action list names two actions of player '" +
                                                               players[it->second].name + "'", c.pos);
                    if (it->second == p) ++own;
                }
                if (own != 1)
                    fail(ErrorCode::AlphabetViolation,
                         "command in module '" + m.name + "' must name exactly one action of player '" + players[p].name + "'",
                         c.pos);
            }
        }
        for (auto& r : ast_.rewards)
            for (auto& item : r.items) {
                std::set<std::size_t> seen;
                for (auto& a : item.actions) {
                    auto it = owner.find(a);
                    if (it == owner.end()) fail(ErrorCode::UndeclaredSymbol, "unknown action '" + a + "'", item.pos);
                    if (!seen.insert(it->second).second)
                        fail(ErrorCode::AlphabetViolation, "reward item names two actions of one player", item.pos);
                }
            }

        ast_.alphabets.assign(players.size(), {});
        std::set<std::string> placed;
        auto place = [&](const std::string& a) {
            if (placed.insert(a).second) ast_.alphabets[owner.at(a)].push_back(a);
        };
        for (auto& p : players)
            for (auto& a : p.actions) place(a);
        for (auto& m : ast_.modules)
            for (auto& c : m.commands)
                for (auto& a : c.actions) place(a);
        for (auto& [a, p] : owner) place(a);
    }

    TokenStream ts_;
    ModelAst ast_;
};

}  // namespace

ModelAst parse_model(std::string_view text) { return ModelParser(text).parse(); }

}  // namespace csgnash
