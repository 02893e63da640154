#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "csgnash/explicit_format.hpp"
#include "csgnash/model_language.hpp"

namespace csgnash {

namespace {

Value coerce_constant(const ConstantDecl& c, const Value& v, SourcePos pos) {
    switch (c.type) {
        case ValueType::Bool:
            if (v.type != ValueType::Bool) fail(ErrorCode::Type, "constant '" + c.name + "' expects a boolean", pos);
            return v;
        case ValueType::Int:
            if (v.type != ValueType::Int) fail(ErrorCode::Type, "constant '" + c.name + "' expects an integer", pos);
            return v;
        default:
            if (v.type == ValueType::Bool) fail(ErrorCode::Type, "constant '" + c.name + "' expects a number", pos);
            if (v.type == ValueType::Int) return Value::rational(v.as_rational());
            return v;
    }
}

Value constant_value(const ExprPtr& e, const std::map<std::string, Value>& known) {
    ExprScope scope;
    scope.constants = &known;
    auto compiled = compile(e, scope);
    if (compiled->op != ExprOp::Literal)
        fail(ErrorCode::Type, "expression '" + print_expression(*e) + "' is not constant", e->pos);
    return compiled->literal;
}

struct CompiledAssign {
    int slot;
    ExprPtr value;
    std::int64_t low, high;
    std::string name;
    SourcePos pos;
};

struct CompiledAlt {
    ExprPtr probability;  // null means 1
    std::vector<CompiledAssign> assigns;
};

struct CompiledCommand {
    ActionId own;
    std::vector<std::pair<PlayerId, ActionId>> conditions;
    ExprPtr guard;
    std::vector<CompiledAlt> alts;
    SourcePos pos;
};

struct CompiledModule {
    PlayerId player;
    std::vector<CompiledCommand> commands;
};

struct CompiledRewardItem {
    std::vector<std::pair<PlayerId, ActionId>> conditions;
    ExprPtr guard;
    ExprPtr value;
    SourcePos pos;
};

// One outcome of a command in a given state: the writes it performs.
struct Outcome {
    std::vector<std::pair<int, std::int32_t>> writes;
    Rational prob;
};

std::string state_key(const std::vector<std::int32_t>& v) {
    return std::string(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(std::int32_t));
}

}  // namespace

std::map<std::string, Value> evaluate_constants(const ModelAst& ast, const std::map<std::string, std::string>& overrides) {
    for (auto& [name, text] : overrides) {
        bool found = std::any_of(ast.constants.begin(), ast.constants.end(),
                                 [&](const ConstantDecl& c) { return c.name == name; });
        if (!found) fail(ErrorCode::UndeclaredSymbol, "model has no constant '" + name + "'");
    }
    std::map<std::string, Value> out;
    std::map<std::string, Value> none;
    for (auto& c : ast.constants) {
        auto it = overrides.find(c.name);
        if (it != overrides.end()) {
            auto e = parse_expression_text(it->second);
            out[c.name] = coerce_constant(c, constant_value(e, none), c.pos);
        } else if (c.value) {
            try {
                out[c.name] = coerce_constant(c, constant_value(c.value, out), c.pos);
            } catch (const Error& err) {
                if (err.code() != ErrorCode::UndeclaredSymbol) throw;
                for (auto& d : ast.constants)
                    if (err.detail().find("'" + d.name + "'") != std::string::npos && !out.count(d.name))
                        fail(ErrorCode::UndefinedConstant,
                             "constant '" + c.name + "' depends on undefined constant '" + d.name + "'", c.pos);
                throw;
            }
        } else {
            fail(ErrorCode::UndefinedConstant,
                 "constant '" + c.name + "' is undefined (supply it with --const " + c.name + "=VALUE)", c.pos);
        }
    }
    return out;
}

Model build_model(const ModelAst& ast, const std::map<std::string, std::string>& overrides) {
    Model model;
    model.constants = evaluate_constants(ast, overrides);
    const auto& constants = model.constants;

    CsgBuilder b;
    std::map<std::string, ActionId> action_ids;
    for (std::size_t p = 0; p < ast.players.size(); ++p) b.add_player(ast.players[p].name);
    std::vector<PlayerId> owner_of;
    for (std::size_t p = 0; p < ast.players.size(); ++p)
        for (auto& a : ast.alphabets[p]) {
            action_ids[a] = b.add_action(static_cast<PlayerId>(p), a);
            owner_of.push_back(static_cast<PlayerId>(p));
        }
    const std::size_t num_players = ast.players.size();

    std::map<std::string, PlayerId> module_player;
    for (std::size_t p = 0; p < ast.players.size(); ++p)
        for (auto& m : ast.players[p].modules) module_player[m] = static_cast<PlayerId>(p);

    // Variables and their slots.
    std::vector<VariableInfo> vars;
    std::map<std::string, std::pair<int, ValueType>> slots;
    std::vector<std::int32_t> initial;
    for (auto& m : ast.modules) {
        for (auto& v : m.variables) {
            VariableInfo info;
            info.name = v.name;
            info.is_bool = v.is_bool;
            if (v.is_bool) {
                info.low = 0;
                info.high = 1;
            } else {
                Value lo = constant_value(v.low, constants), hi = constant_value(v.high, constants);
                if (lo.type != ValueType::Int || hi.type != ValueType::Int)
                    fail(ErrorCode::Type, "bounds of '" + v.name + "' must be integers", v.pos);
                if (lo.i > hi.i) fail(ErrorCode::RangeOverflow, "empty range for '" + v.name + "'", v.pos);
                info.low = static_cast<std::int32_t>(lo.i);
                info.high = static_cast<std::int32_t>(hi.i);
            }
            std::int64_t init = info.low;
            if (v.init) {
                Value iv = constant_value(v.init, constants);
                if (v.is_bool != (iv.type == ValueType::Bool) || iv.type == ValueType::Rat || iv.type == ValueType::Real)
                    fail(ErrorCode::Type, "initial value of '" + v.name + "' has the wrong type", v.pos);
                init = v.is_bool ? (iv.b ? 1 : 0) : iv.i;
            }
            if (init < info.low || init > info.high)
                fail(ErrorCode::RangeOverflow, "initial value of '" + v.name + "' is out of range", v.pos);
            slots[v.name] = {static_cast<int>(vars.size()), v.is_bool ? ValueType::Bool : ValueType::Int};
            initial.push_back(static_cast<std::int32_t>(init));
            vars.push_back(info);
        }
    }

    ExprScope scope;
    scope.constants = &constants;
    scope.variable = [&](const std::string& name) -> std::optional<std::pair<int, ValueType>> {
        auto it = slots.find(name);
        if (it == slots.end()) return std::nullopt;
        return it->second;
    };
    bool exact = true;
    auto compile_typed = [&](const ExprPtr& e, bool want_bool, const char* what) {
        auto c = compile(e, scope);
        if ((c->type == ValueType::Bool) != want_bool)
            fail(ErrorCode::Type, std::string(what) + " must be " + (want_bool ? "boolean" : "numeric"), e->pos);
        if (involves_real(*c)) exact = false;
        return c;
    };
    auto conditions_of = [&](const std::vector<std::string>& actions) {
        std::vector<std::pair<PlayerId, ActionId>> out;
        for (auto& a : actions)
            out.emplace_back(static_cast<PlayerId>(ast.action_owner.at(a)), action_ids.at(a));
        return out;
    };

    std::vector<CompiledModule> modules;
    for (auto& m : ast.modules) {
        CompiledModule cm;
        cm.player = module_player.at(m.name);
        for (auto& c : m.commands) {
            CompiledCommand cc;
            cc.pos = c.pos;
            cc.guard = compile_typed(c.guard, true, "guard");
            for (auto& [p, a] : conditions_of(c.actions)) {
                if (p == cm.player) cc.own = a;
                else cc.conditions.emplace_back(p, a);
            }
            for (auto& u : c.updates) {
                CompiledAlt alt;
                if (u.probability) alt.probability = compile_typed(u.probability, false, "probability");
                for (auto& a : u.assignments) {
                    auto [slot, type] = slots.at(a.variable);
                    auto value = compile(a.value, scope);
                    if ((type == ValueType::Bool) != (value->type == ValueType::Bool) || value->type == ValueType::Rat ||
                        value->type == ValueType::Real)
                        fail(ErrorCode::Type, "assignment to '" + a.variable + "' has the wrong type", a.pos);
                    alt.assigns.push_back({slot, value, vars[slot].low, vars[slot].high, a.variable, a.pos});
                }
                cc.alts.push_back(std::move(alt));
            }
            cm.commands.push_back(std::move(cc));
        }
        modules.push_back(std::move(cm));
    }

    // For each action, the modules of its owner that must all enable it.
    std::map<ActionId, std::vector<std::size_t>> action_modules;
    for (std::size_t m = 0; m < modules.size(); ++m)
        for (auto& c : modules[m].commands) {
            auto& list = action_modules[c.own];
            if (list.empty() || list.back() != m) list.push_back(m);
        }

    struct CompiledReward {
        std::vector<CompiledRewardItem> items;
        std::size_t handle;
    };
    std::vector<CompiledReward> rewards;
    for (auto& r : ast.rewards) {
        CompiledReward cr;
        cr.handle = b.add_reward(r.name);
        for (auto& item : r.items)
            cr.items.push_back({conditions_of(item.actions), compile_typed(item.guard, true, "reward guard"),
                                compile_typed(item.value, false, "reward value"), item.pos});
        rewards.push_back(std::move(cr));
    }
    std::vector<std::pair<std::string, ExprPtr>> labels;
    for (auto& l : ast.labels) labels.emplace_back(l.name, compile_typed(l.predicate, true, "label"));

    auto numeric = [&](const Expr& e, Valuation val) {
        return exact ? eval_rational(e, val) : rational_from_double(eval_real(e, val));
    };

    std::vector<std::vector<std::int32_t>> states;
    std::unordered_map<std::string, StateId> index;
    std::deque<StateId> queue;
    auto intern = [&](std::vector<std::int32_t> v) {
        auto key = state_key(v);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        StateId s = b.add_state();
        index.emplace(std::move(key), s);
        states.push_back(std::move(v));
        queue.push_back(s);
        return s;
    };
    auto describe = [&](const std::vector<std::int32_t>& v) {
        std::string out = "(";
        for (std::size_t k = 0; k < vars.size(); ++k) {
            if (k) out += ",";
            out += vars[k].name + "=" + (vars[k].is_bool ? (v[k] ? "true" : "false") : std::to_string(v[k]));
        }
        return out + ")";
    };

    b.set_initial(intern(initial));
    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        const std::vector<std::int32_t> cur = states[s];
        Valuation val(cur);

        // Enabled commands and their outcomes.
        std::vector<std::vector<bool>> enabled(modules.size());
        std::vector<std::vector<std::vector<Outcome>>> outcomes(modules.size());
        for (std::size_t m = 0; m < modules.size(); ++m) {
            auto& cmds = modules[m].commands;
            enabled[m].assign(cmds.size(), false);
            outcomes[m].resize(cmds.size());
            for (std::size_t c = 0; c < cmds.size(); ++c) {
                if (!eval_bool(*cmds[c].guard, val)) continue;
                enabled[m][c] = true;
                Rational total = 0;
                for (auto& alt : cmds[c].alts) {
                    Rational pr = alt.probability ? numeric(*alt.probability, val) : Rational(1);
                    if (pr < 0)
                        fail(ErrorCode::ProbabilitySum, "negative probability in state " + describe(cur), cmds[c].pos);
                    total += pr;
                    if (pr == 0) continue;
                    Outcome o;
                    o.prob = pr;
                    for (auto& a : alt.assigns) {
                        std::int64_t x = a.value->type == ValueType::Bool ? (eval_bool(*a.value, val) ? 1 : 0)
                                                                         : eval_int(*a.value, val);
                        if (x < a.low || x > a.high)
                            fail(ErrorCode::RangeOverflow,
                                 "update sets '" + a.name + "' to " + std::to_string(x) + " outside [" +
                                     std::to_string(a.low) + ".." + std::to_string(a.high) + "] in state " + describe(cur),
                                 a.pos);
                        o.writes.emplace_back(a.slot, static_cast<std::int32_t>(x));
                    }
                    outcomes[m][c].push_back(std::move(o));
                }
                bool ok = exact ? total == 1 : approx_equal(total, Rational(1), Rational(1, 1000000000));
                if (!ok)
                    fail(ErrorCode::ProbabilitySum,
                         "probabilities sum to " + to_string(total) + " in state " + describe(cur), cmds[c].pos);
            }
        }

        // Available actions per player.
        std::vector<std::vector<ActionId>> avail(num_players);
        for (auto& [a, mods] : action_modules) {
            bool ok = true;
            for (std::size_t m : mods) {
                bool any = false;
                for (std::size_t c = 0; c < modules[m].commands.size() && !any; ++c)
                    any = enabled[m][c] && modules[m].commands[c].own == a;
                ok = ok && any;
            }
            if (ok) avail[owner_of[static_cast<std::size_t>(a)]].push_back(a);
        }
        for (auto& list : avail) {
            std::sort(list.begin(), list.end());
            if (list.empty()) list.push_back(kIdle);
        }

        std::vector<std::size_t> pos(num_players, 0);
        std::vector<ActionId> joint(num_players);
        bool done = false;
        while (!done) {
            for (std::size_t p = 0; p < num_players; ++p) joint[p] = avail[p][pos[p]];
            std::vector<const std::vector<Outcome>*> parts;
            for (std::size_t m = 0; m < modules.size(); ++m) {
                const auto& cmds = modules[m].commands;
                const std::vector<Outcome>* match = nullptr;
                std::size_t match_index = 0;
                for (std::size_t c = 0; c < cmds.size(); ++c) {
                    if (!enabled[m][c] || cmds[c].own != joint[modules[m].player]) continue;
                    bool fits = std::all_of(cmds[c].conditions.begin(), cmds[c].conditions.end(),
                                            [&](const auto& pc) { return joint[pc.first] == pc.second; });
                    if (!fits) continue;
                    if (match)
                        fail(ErrorCode::UpdateClash,
                             "commands at " + std::to_string(cmds[match_index].pos.line) + ":" +
                                 std::to_string(cmds[match_index].pos.column) + " and " +
                                 std::to_string(cmds[c].pos.line) + ":" + std::to_string(cmds[c].pos.column) +
                                 " both match in state " + describe(cur),
                             cmds[c].pos);
                    match = &outcomes[m][c];
                    match_index = c;
                }
                if (match) parts.push_back(match);
            }
            std::vector<std::pair<std::vector<std::int32_t>, Rational>> dist{{cur, Rational(1)}};
            for (auto* part : parts) {
                std::vector<std::pair<std::vector<std::int32_t>, Rational>> next;
                next.reserve(dist.size() * part->size());
                for (auto& [v, pr] : dist)
                    for (auto& o : *part) {
                        auto w = v;
                        for (auto& [slot, x] : o.writes) w[static_cast<std::size_t>(slot)] = x;
                        next.emplace_back(std::move(w), pr * o.prob);
                    }
                dist = std::move(next);
            }
            std::vector<std::pair<StateId, Rational>> row;
            for (auto& [v, pr] : dist) {
                StateId t = intern(std::move(v));
                auto it = std::find_if(row.begin(), row.end(), [&](const auto& e) { return e.first == t; });
                if (it == row.end()) row.emplace_back(t, pr);
                else it->second += pr;
            }
            std::size_t handle = b.add_row(s, joint, std::move(row));
            for (auto& cr : rewards) {
                Rational total = 0;
                bool any = false;
                for (auto& item : cr.items) {
                    if (item.conditions.empty()) continue;
                    bool fits = std::all_of(item.conditions.begin(), item.conditions.end(),
                                            [&](const auto& pc) { return joint[pc.first] == pc.second; });
                    if (fits && eval_bool(*item.guard, val)) {
                        total += numeric(*item.value, val);
                        any = true;
                    }
                }
                if (any && total != 0) b.set_action_reward(cr.handle, handle, total);
            }

            std::size_t p = num_players;
            while (true) {
                if (p == 0) {
                    done = true;
                    break;
                }
                --p;
                if (++pos[p] < avail[p].size()) break;
                pos[p] = 0;
            }
        }

        for (auto& cr : rewards) {
            Rational total = 0;
            for (auto& item : cr.items)
                if (item.conditions.empty() && eval_bool(*item.guard, val)) total += numeric(*item.value, val);
            if (total != 0) b.set_state_reward(cr.handle, s, total);
        }
    }

    b.set_variables(vars);
    for (StateId s = 0; s < states.size(); ++s) b.set_valuation(s, states[s]);
    for (auto& [name, pred] : labels) {
        StateSet set(states.size(), false);
        for (StateId s = 0; s < states.size(); ++s) set[s] = eval_bool(*pred, Valuation(states[s]));
        b.add_label(name, std::move(set));
    }
    if (std::none_of(labels.begin(), labels.end(), [](const auto& l) { return l.first == "init"; })) {
        StateSet set(states.size(), false);
        set[0] = true;
        b.add_label("init", std::move(set));
    }
    if (!exact) b.mark_inexact();
    model.game = b.finish(true);
    return model;
}

Csg build_csg(const ModelAst& ast, const std::map<std::string, std::string>& overrides) {
    return build_model(ast, overrides).game;
}

Model load_model_text(const std::string& text, const std::map<std::string, std::string>& overrides) {
    std::istringstream lines(text);
    std::string line, first;
    while (first.empty() && std::getline(lines, line)) {
        std::istringstream words(line);
        words >> first;
        if (first.rfind("#", 0) == 0 || first.rfind("//", 0) == 0) first.clear();
    }
    if (first == "players") {
        if (!overrides.empty()) fail(ErrorCode::UndeclaredSymbol, "explicit-state games have no constants");
        return Model{parse_explicit(text), {}};
    }
    return build_model(parse_model(text), overrides);
}

Model load_model_file(const std::string& path, const std::map<std::string, std::string>& overrides) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_model_text(ss.str(), overrides);
}

}  // namespace csgnash
