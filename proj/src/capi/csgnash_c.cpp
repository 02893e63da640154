#include "csgnash/csgnash.h"

#include <chrono>
#include <cmath>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "csgnash/bimatrix.hpp"
#include "csgnash/error.hpp"
#include "csgnash/evaluator.hpp"
#include "csgnash/explicit_format.hpp"
#include "csgnash/model_language.hpp"
#include "json.hpp"

using namespace csgnash;
using nlohmann::json;

struct csgn_model {
    Model model;
    double build_seconds = 0.0;
};

struct csgn_result {
    PropertyResult result;
    std::string property;
    std::array<std::string, 2> exact;
    std::vector<std::array<std::string, 2>> trace_values;
    std::vector<std::size_t> trace_iterations;
    std::string strategy;
    std::string record;
};

namespace {

thread_local std::string last_error;

csgn_status record(const std::exception& e) {
    last_error = e.what();
    if (auto* err = dynamic_cast<const Error*>(&e)) return static_cast<csgn_status>(static_cast<int>(err->code()) + 1);
    return CSGN_ERR_INTERNAL;
}

template <class F>
csgn_status guarded(F&& body) {
    try {
        last_error.clear();
        body();
        return CSGN_OK;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return CSGN_ERR_INTERNAL;
    } catch (const std::exception& e) {
        return record(e);
    }
}

std::pair<std::string, std::string> split_assignment(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        fail(ErrorCode::InvalidArgument, "expected NAME=VALUE, got '" + text + "'");
    return {text.substr(0, eq), text.substr(eq + 1)};
}

std::map<std::string, std::string> assignments(const char* const* list, std::size_t count) {
    std::map<std::string, std::string> out;
    for (std::size_t k = 0; k < count; ++k) {
        if (!list || !list[k]) fail(ErrorCode::InvalidArgument, "null assignment");
        auto [name, value] = split_assignment(list[k]);
        out[name] = value;
    }
    return out;
}

Value constant_value(const std::string& name, const std::string& text, const std::map<std::string, Value>& known) {
    ExprScope scope;
    scope.constants = &known;
    ExprPtr e = compile(parse_expression_text(text), scope);
    if (e->op != ExprOp::Literal) fail(ErrorCode::Type, "value of '" + name + "' is not constant: " + text);
    return e->literal;
}

json number(double d) {
    if (std::isfinite(d)) return d;
    return format_double(d);
}

std::string kind_name(FormulaKind k) {
    switch (k) {
        case FormulaKind::Nash: return "nash";
        case FormulaKind::Prob: return "prob";
        case FormulaKind::Reward: return "reward";
        default: return "boolean";
    }
}

json record_json(const csgn_result& r) {
    const PropertyResult& p = r.result;
    json j;
    j["property"] = r.property;
    j["kind"] = kind_name(p.kind);
    j["numerical"] = p.numerical;
    if (!p.numerical) j["holds"] = p.holds;
    if (p.kind == FormulaKind::Nash) {
        j["v1"] = number(p.pair[0]);
        j["v2"] = number(p.pair[1]);
        j["sum"] = number(p.sum);
        if (p.exact_pair) j["exact"] = {{"v1", r.exact[0]}, {"v2", r.exact[1]}};
    } else if (p.numerical) {
        j["value"] = number(p.value);
    }
    j["iterations"] = p.iterations;
    j["converged"] = p.converged;
    if (p.nash) {
        j["oscillating"] = p.nash->oscillating;
        j["horizon"] = horizon_name(p.nash->horizon);
        if (p.nash->assumption.checked) j["assumption_holds"] = p.nash->assumption.holds;
        j["local_games"] = p.nash->local_games;
    }
    j["time"] = {{"mdp", p.mdp_seconds}, {"csg", p.csg_seconds}};
    j["warnings"] = p.warnings;
    if (p.verify) {
        j["verify"] = {{"gap1", number(p.verify->gap[0])},
                       {"gap2", number(p.verify->gap[1])},
                       {"worst_reachable_gap1", number(p.verify->worst_reachable_gap[0])},
                       {"worst_reachable_gap2", number(p.verify->worst_reachable_gap[1])},
                       {"induced_states", p.verify->induced_states},
                       {"pass", p.verify->pass}};
    }
    if (!r.trace_iterations.empty()) {
        json t = json::array();
        for (std::size_t k = 0; k < r.trace_iterations.size(); ++k)
            t.push_back({{"iteration", r.trace_iterations[k]}, {"v1", r.trace_values[k][0]}, {"v2", r.trace_values[k][1]}});
        j["trace"] = std::move(t);
    }
    return j;
}

json profile_entry(const MixedProfile& p) {
    json x = json::array(), y = json::array();
    for (auto& q : p.x) x.push_back(to_string(q));
    for (auto& q : p.y) y.push_back(to_string(q));
    return {{"x", x}, {"y", y}, {"u", to_string(p.u)}, {"v", to_string(p.v)}, {"sum", to_string(Rational(p.u + p.v))}};
}

}  // namespace

extern "C" {

const char* csgn_last_error(void) { return last_error.c_str(); }

const char* csgn_status_name(csgn_status status) {
    if (status == CSGN_OK) return "Ok";
    if (status < CSGN_OK || status > CSGN_ERR_INTERNAL) return "Unknown";
    return error_code_name(static_cast<ErrorCode>(static_cast<int>(status) - 1));
}

const char* csgn_version(void) { return "0.1.0"; }

void csgn_string_free(char* s) { delete[] s; }

static char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

static csgn_status load_common(const std::string* path, const char* text, const char* const* overrides,
                               std::size_t count, csgn_model** out) {
    if (!out) {
        last_error = "null output handle";
        return CSGN_ERR_INVALID_ARGUMENT;
    }
    *out = nullptr;
    return guarded([&]() {
        auto ov = assignments(overrides, count);
        auto t0 = std::chrono::steady_clock::now();
        auto m = std::make_unique<csgn_model>();
        m->model = path ? load_model_file(*path, ov) : load_model_text(text, ov);
        m->build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        *out = m.release();
    });
}

csgn_status csgn_model_load(const char* path, const char* const* overrides, size_t count, csgn_model** out) {
    if (!path) {
        last_error = "null path";
        return CSGN_ERR_INVALID_ARGUMENT;
    }
    std::string p = path;
    return load_common(&p, nullptr, overrides, count, out);
}

csgn_status csgn_model_load_text(const char* text, const char* const* overrides, size_t count, csgn_model** out) {
    if (!text) {
        last_error = "null text";
        return CSGN_ERR_INVALID_ARGUMENT;
    }
    return load_common(nullptr, text, overrides, count, out);
}

void csgn_model_free(csgn_model* model) { delete model; }

size_t csgn_model_num_states(const csgn_model* m) { return m ? m->model.game.num_states() : 0; }
size_t csgn_model_num_choices(const csgn_model* m) { return m ? m->model.game.num_rows() : 0; }
size_t csgn_model_num_transitions(const csgn_model* m) { return m ? m->model.game.num_transitions() : 0; }
size_t csgn_model_num_players(const csgn_model* m) { return m ? m->model.game.num_players() : 0; }

const char* csgn_model_player_name(const csgn_model* m, size_t player) {
    if (!m || player >= m->model.game.num_players()) return nullptr;
    return m->model.game.player_name(static_cast<PlayerId>(player)).c_str();
}

double csgn_model_build_seconds(const csgn_model* m) { return m ? m->build_seconds : 0.0; }

int csgn_model_has_constant(const csgn_model* m, const char* name) {
    return m && name && m->model.constants.count(name) ? 1 : 0;
}

char* csgn_model_export_explicit(const csgn_model* m) {
    if (!m) return nullptr;
    try {
        return copy_string(write_explicit(m->model.game));
    } catch (const std::exception& e) {
        record(e);
        return nullptr;
    }
}

void csgn_options_default(csgn_options* o) {
    if (!o) return;
    NashOptions n;
    o->conv_epsilon = n.conv_epsilon;
    o->max_iterations = n.max_iterations;
    o->mdp_epsilon = n.mdp_epsilon;
    o->exact = 0;
    o->strict_assumptions = 0;
    o->verify = 0;
    o->verify_epsilon = 1e-4;
    o->threads = 1;
    o->trace_limit = 0;
}

csgn_status csgn_check(const csgn_model* model, const char* property, const csgn_options* options,
                       const char* const* defines, size_t define_count, csgn_result** out) {
    if (!out || !model || !property) {
        last_error = "null argument";
        return CSGN_ERR_INVALID_ARGUMENT;
    }
    *out = nullptr;
    return guarded([&]() {
        csgn_options o;
        csgn_options_default(&o);
        if (options) o = *options;
        if (!(o.conv_epsilon > 0) || !(o.mdp_epsilon > 0) || !(o.verify_epsilon >= 0))
            fail(ErrorCode::InvalidArgument, "epsilon values must be positive");

        const Csg& game = model->model.game;
        std::map<std::string, Value> constants = model->model.constants;
        for (auto& [name, text] : assignments(defines, define_count))
            constants[name] = constant_value(name, text, constants);

        PropertyContext ctx{&game, &constants};
        FormulaPtr f = parse_property(property, ctx);

        EvalOptions eo;
        eo.nash.conv_epsilon = o.conv_epsilon;
        eo.nash.max_iterations = o.max_iterations;
        eo.nash.mdp_epsilon = o.mdp_epsilon;
        eo.nash.exact = o.exact != 0;
        eo.nash.strict_assumptions = o.strict_assumptions != 0;
        eo.nash.threads = o.threads ? o.threads : 1;
        if (o.trace_limit) {
            eo.nash.trace_states = game.initial_states();
            eo.nash.trace_limit = o.trace_limit;
        }
        eo.verify = o.verify != 0;
        eo.verify_epsilon = o.verify_epsilon;

        auto r = std::make_unique<csgn_result>();
        r->property = print_formula(*f, game);
        Evaluator ev(game, eo);
        r->result = ev.evaluate(*f);
        const PropertyResult& p = r->result;
        if (p.exact_pair) {
            r->exact[0] = to_string((*p.exact_pair)[0]);
            r->exact[1] = to_string((*p.exact_pair)[1]);
        }
        if (p.nash) {
            const StateId s0 = game.initial_states().front();
            for (auto& t : p.nash->trace) {
                if (t.state != s0) continue;
                r->trace_iterations.push_back(t.iteration);
                r->trace_values.push_back({to_string(t.v1), to_string(t.v2)});
            }
            if (p.nash->profile)
                r->strategy = profile_json(p.nash->solved, *p.nash->profile, r->property, p.nash->starts, &*p.nash);
        }
        r->record = record_json(*r).dump();
        *out = r.release();
    });
}

void csgn_result_free(csgn_result* r) { delete r; }

const char* csgn_result_property(const csgn_result* r) { return r ? r->property.c_str() : nullptr; }
int csgn_result_numerical(const csgn_result* r) { return r && r->result.numerical ? 1 : 0; }
int csgn_result_holds(const csgn_result* r) { return r && r->result.holds ? 1 : 0; }
int csgn_result_is_nash(const csgn_result* r) { return r && r->result.kind == FormulaKind::Nash ? 1 : 0; }
double csgn_result_value(const csgn_result* r) { return r ? r->result.value : 0.0; }
double csgn_result_sum(const csgn_result* r) { return r ? r->result.sum : 0.0; }

double csgn_result_player_value(const csgn_result* r, int side) {
    if (!r || side < 0 || side > 1) return 0.0;
    return r->result.pair[static_cast<std::size_t>(side)];
}

const char* csgn_result_exact_value(const csgn_result* r, int side) {
    if (!r || side < 0 || side > 1 || !r->result.exact_pair) return nullptr;
    return r->exact[static_cast<std::size_t>(side)].c_str();
}

int csgn_result_converged(const csgn_result* r) { return r && r->result.converged ? 1 : 0; }
int csgn_result_oscillating(const csgn_result* r) { return r && r->result.nash && r->result.nash->oscillating ? 1 : 0; }
size_t csgn_result_iterations(const csgn_result* r) { return r ? r->result.iterations : 0; }
double csgn_result_mdp_seconds(const csgn_result* r) { return r ? r->result.mdp_seconds : 0.0; }
double csgn_result_csg_seconds(const csgn_result* r) { return r ? r->result.csg_seconds : 0.0; }
size_t csgn_result_num_warnings(const csgn_result* r) { return r ? r->result.warnings.size() : 0; }

const char* csgn_result_warning(const csgn_result* r, size_t index) {
    if (!r || index >= r->result.warnings.size()) return nullptr;
    return r->result.warnings[index].c_str();
}

int csgn_result_assumption(const csgn_result* r) {
    if (!r || !r->result.nash || !r->result.nash->assumption.checked) return -1;
    return r->result.nash->assumption.holds ? 1 : 0;
}

int csgn_result_has_verify(const csgn_result* r) { return r && r->result.verify ? 1 : 0; }

double csgn_result_verify_gap(const csgn_result* r, int side) {
    if (!r || !r->result.verify || side < 0 || side > 1) return 0.0;
    return r->result.verify->gap[static_cast<std::size_t>(side)];
}

int csgn_result_verify_pass(const csgn_result* r) { return r && r->result.verify && r->result.verify->pass ? 1 : 0; }

size_t csgn_result_trace_length(const csgn_result* r) { return r ? r->trace_iterations.size() : 0; }

size_t csgn_result_trace_iteration(const csgn_result* r, size_t index) {
    if (!r || index >= r->trace_iterations.size()) return 0;
    return r->trace_iterations[index];
}

const char* csgn_result_trace_value(const csgn_result* r, size_t index, int side) {
    if (!r || index >= r->trace_values.size() || side < 0 || side > 1) return nullptr;
    return r->trace_values[index][static_cast<std::size_t>(side)].c_str();
}

const char* csgn_result_strategy_json(const csgn_result* r) {
    if (!r || r->strategy.empty()) return nullptr;
    return r->strategy.c_str();
}

const char* csgn_result_json(const csgn_result* r) { return r ? r->record.c_str() : nullptr; }

csgn_status csgn_solve_nfg(size_t rows, size_t cols, const char* const* z1, const char* const* z2,
                           int eliminate_dominated_flag, char** json_out) {
    if (!json_out || !z1 || !z2) {
        last_error = "null argument";
        return CSGN_ERR_INVALID_ARGUMENT;
    }
    *json_out = nullptr;
    return guarded([&]() {
        if (rows == 0 || cols == 0) fail(ErrorCode::DimensionMismatch, "game needs at least one row and one column");
        BimatrixGame g(rows, cols);
        for (std::size_t k = 0; k < rows * cols; ++k) {
            if (!z1[k] || !z2[k]) fail(ErrorCode::InvalidArgument, "null payoff entry");
            g.z1[k] = parse_rational(z1[k]);
            g.z2[k] = parse_rational(z2[k]);
        }
        std::vector<std::size_t> row_map(rows), col_map(cols);
        for (std::size_t i = 0; i < rows; ++i) row_map[i] = i;
        for (std::size_t j = 0; j < cols; ++j) col_map[j] = j;
        BimatrixGame solved = g;
        if (eliminate_dominated_flag) {
            DominanceReduction d = eliminate_dominated(g);
            solved = std::move(d.reduced);
            row_map = std::move(d.row_map);
            col_map = std::move(d.col_map);
        }
        std::vector<MixedProfile> eqs = enumerate_equilibria(solved);
        for (auto& e : eqs) {
            std::vector<Rational> x(rows, Rational(0)), y(cols, Rational(0));
            for (std::size_t i = 0; i < e.x.size(); ++i) x[row_map[i]] = e.x[i];
            for (std::size_t j = 0; j < e.y.size(); ++j) y[col_map[j]] = e.y[j];
            e.x = std::move(x);
            e.y = std::move(y);
        }
        json j;
        j["rows"] = rows;
        j["cols"] = cols;
        j["kept_rows"] = row_map;
        j["kept_cols"] = col_map;
        j["equilibria"] = json::array();
        for (auto& e : eqs) {
            json entry = profile_entry(e);
            entry["certified"] = is_equilibrium(g, e.x, e.y, e.u, e.v, 0);
            j["equilibria"].push_back(std::move(entry));
        }
        std::size_t best = select_swne(eqs);
        j["swne"] = best;
        j["swne_profile"] = profile_entry(eqs[best]);
        *json_out = copy_string(j.dump());
    });
}

}  // extern "C"
