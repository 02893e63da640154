// Command-line front end: model checking runs, parameter sweeps and
// standalone bimatrix games.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csgnash/csgnash.h"
#include "json.hpp"

using nlohmann::json;

namespace {

enum Exit { kOk = 0, kViolated = 1, kUsage = 2, kNotConverged = 3 };

struct Failure {
    std::string message;
};

struct ModelHandle {
    csgn_model* m = nullptr;
    ModelHandle() = default;
    ModelHandle(const ModelHandle&) = delete;
    ModelHandle& operator=(const ModelHandle&) = delete;
    ~ModelHandle() { csgn_model_free(m); }
};

struct ResultHandle {
    csgn_result* r = nullptr;
    ~ResultHandle() { csgn_result_free(r); }
};

struct RunConfig {
    std::string model;
    std::vector<std::string> consts;
    std::vector<std::string> properties;
    std::string property_file;
    double epsilon = 1e-4;
    double conv_epsilon = 1e-6;
    std::size_t max_iters = 10000;
    bool strict = false;
    bool exact = false;
    std::size_t trace = 0;
    std::string export_strategy;
    bool verify = false;
    std::string format = "human";
    std::string sweep;
};

std::string fmt(double d) {
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    if (std::isnan(d)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", d);
    std::string s = buf;
    if (s.find_first_of(".en") == std::string::npos) s += ".0";
    return s;
}

std::string seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", s);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Failure{"cannot read '" + path + "'"};
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string api_error(csgn_status st) {
    std::string msg = csgn_last_error();
    return msg.empty() ? csgn_status_name(st) : msg;
}

std::vector<std::string> property_list(const RunConfig& cfg) {
    std::vector<std::string> out = cfg.properties;
    if (!cfg.property_file.empty()) {
        std::istringstream lines(read_file(cfg.property_file));
        std::string line;
        while (std::getline(lines, line)) {
            auto c = line.find("//");
            if (c != std::string::npos) line.erase(c);
            auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos) continue;
            auto e = line.find_last_not_of(" \t\r");
            out.push_back(line.substr(b, e - b + 1));
        }
    }
    if (out.empty()) throw Failure{"no property given (use --property or --property-file)"};
    return out;
}

std::string name_of(const std::string& assignment) { return assignment.substr(0, assignment.find('=')); }

// Loads the model; assignments naming no model constant become property defines.
void load_model(const std::string& path, std::vector<std::string> consts, ModelHandle& out,
                std::vector<std::string>& defines) {
    defines.clear();
    while (true) {
        std::vector<const char*> argv;
        for (auto& c : consts) argv.push_back(c.c_str());
        csgn_model* m = nullptr;
        csgn_status st = csgn_model_load(path.c_str(), argv.data(), argv.size(), &m);
        if (st == CSGN_OK) {
            csgn_model_free(out.m);
            out.m = m;
            return;
        }
        std::string msg = csgn_last_error();
        bool moved = false;
        if (st == CSGN_ERR_UNDECLARED_SYMBOL) {
            for (std::size_t k = 0; k < consts.size(); ++k) {
                if (msg.find("no constant '" + name_of(consts[k]) + "'") != std::string::npos) {
                    defines.push_back(consts[k]);
                    consts.erase(consts.begin() + static_cast<std::ptrdiff_t>(k));
                    moved = true;
                    break;
                }
            }
        }
        if (!moved) throw Failure{api_error(st)};
    }
}

csgn_options make_options(const RunConfig& cfg) {
    csgn_options o;
    csgn_options_default(&o);
    o.conv_epsilon = cfg.conv_epsilon;
    o.max_iterations = cfg.max_iters;
    o.exact = cfg.exact;
    o.strict_assumptions = cfg.strict;
    o.verify = cfg.verify;
    o.verify_epsilon = cfg.epsilon;
    o.trace_limit = cfg.trace;
    if (const char* t = std::getenv("CSG_THREADS")) {
        int n = std::atoi(t);
        if (n > 0) o.threads = static_cast<unsigned>(n);
    }
    return o;
}

void check(const csgn_model* m, const std::string& property, const csgn_options& o,
           const std::vector<std::string>& defines, ResultHandle& out) {
    std::vector<const char*> argv;
    for (auto& d : defines) argv.push_back(d.c_str());
    csgn_status st = csgn_check(m, property.c_str(), &o, argv.data(), argv.size(), &out.r);
    if (st != CSGN_OK) throw Failure{api_error(st)};
}

int exit_for(const csgn_result* r) {
    if (!csgn_result_converged(r)) return kNotConverged;
    if (!csgn_result_numerical(r) && !csgn_result_holds(r)) return kViolated;
    return kOk;
}

int worse(int a, int b) {
    auto rank = [](int c) { return c == kUsage ? 3 : c == kNotConverged ? 2 : c == kViolated ? 1 : 0; };
    return rank(b) > rank(a) ? b : a;
}

void print_human(const csgn_result* r, double constr) {
    std::cout << "Property: " << csgn_result_property(r) << "\n";
    if (csgn_result_is_nash(r)) {
        if (!csgn_result_numerical(r)) std::cout << "Result: " << (csgn_result_holds(r) ? "true" : "false") << "\n";
        std::cout << "Values: sum=" << fmt(csgn_result_sum(r)) << " v1=" << fmt(csgn_result_player_value(r, 0))
                  << " v2=" << fmt(csgn_result_player_value(r, 1)) << "\n";
        if (const char* e1 = csgn_result_exact_value(r, 0))
            std::cout << "Exact: v1=" << e1 << " v2=" << csgn_result_exact_value(r, 1) << "\n";
    } else if (csgn_result_numerical(r)) {
        std::cout << "Result: " << fmt(csgn_result_value(r)) << "\n";
    } else {
        std::cout << "Result: " << (csgn_result_holds(r) ? "true" : "false") << "\n";
    }
    std::cout << "Iterations: " << csgn_result_iterations(r)
              << (csgn_result_converged(r) ? " (converged)" : " (NotConverged)") << "\n";
    for (std::size_t k = 0; k < csgn_result_trace_length(r); ++k)
        std::cout << "Trace: iteration " << csgn_result_trace_iteration(r, k) << " (" << csgn_result_trace_value(r, k, 0)
                  << ", " << csgn_result_trace_value(r, k, 1) << ")\n";
    std::cout << "Time: constr " << seconds(constr) << " s, mdp " << seconds(csgn_result_mdp_seconds(r)) << " s, csg "
              << seconds(csgn_result_csg_seconds(r)) << " s\n";
    for (std::size_t k = 0; k < csgn_result_num_warnings(r); ++k)
        std::cout << "Warning: " << csgn_result_warning(r, k) << "\n";
    if (csgn_result_has_verify(r))
        std::cout << "Verify: gap1=" << fmt(csgn_result_verify_gap(r, 0)) << " gap2=" << fmt(csgn_result_verify_gap(r, 1))
                  << (csgn_result_verify_pass(r) ? " pass" : " FAIL") << "\n";
}

const char* kCsvHeader = "property,kind,holds,value,v1,v2,sum,iterations,converged,constr_s,mdp_s,csg_s";

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void print_csv_row(const csgn_result* r, double constr) {
    json j = json::parse(csgn_result_json(r));
    std::cout << csv_quote(csgn_result_property(r)) << "," << j["kind"].get<std::string>() << ","
              << (csgn_result_numerical(r) ? "" : (csgn_result_holds(r) ? "true" : "false")) << ","
              << (csgn_result_numerical(r) && !csgn_result_is_nash(r) ? fmt(csgn_result_value(r)) : "") << ",";
    if (csgn_result_is_nash(r))
        std::cout << fmt(csgn_result_player_value(r, 0)) << "," << fmt(csgn_result_player_value(r, 1)) << ","
                  << fmt(csgn_result_sum(r));
    else
        std::cout << ",,";
    std::cout << "," << csgn_result_iterations(r) << "," << (csgn_result_converged(r) ? "true" : "false") << ","
              << seconds(constr) << "," << seconds(csgn_result_mdp_seconds(r)) << ","
              << seconds(csgn_result_csg_seconds(r)) << "\n";
}

void export_strategy(const std::string& path, std::size_t index, std::size_t count, const csgn_result* r) {
    const char* s = csgn_result_strategy_json(r);
    if (!s) return;
    std::string target = path;
    if (count > 1) {
        auto dot = path.rfind('.');
        std::string tag = "." + std::to_string(index + 1);
        target = dot == std::string::npos ? path + tag : path.substr(0, dot) + tag + path.substr(dot);
    }
    std::ofstream out(target);
    if (!out) throw Failure{"cannot write '" + target + "'"};
    out << json::parse(s).dump(2) << "\n";
}

int run(const RunConfig& cfg) {
    auto props = property_list(cfg);
    ModelHandle model;
    std::vector<std::string> defines;
    load_model(cfg.model, cfg.consts, model, defines);
    for (auto& d : defines) {
        const std::regex word("\\b" + name_of(d) + "\\b");
        bool used = false;
        for (auto& p : props) used = used || std::regex_search(p, word);
        if (!used) throw Failure{"'" + name_of(d) + "' is neither a model constant nor used by any property"};
    }
    const double constr = csgn_model_build_seconds(model.m);
    const csgn_options o = make_options(cfg);

    json doc;
    if (cfg.format == "json") {
        doc["model"] = {{"path", cfg.model},
                        {"states", csgn_model_num_states(model.m)},
                        {"choices", csgn_model_num_choices(model.m)},
                        {"transitions", csgn_model_num_transitions(model.m)},
                        {"constr_seconds", constr}};
        doc["results"] = json::array();
    } else if (cfg.format == "csv") {
        std::cout << kCsvHeader << "\n";
    } else {
        std::cout << "Model: " << cfg.model << ": " << csgn_model_num_states(model.m) << " states, "
                  << csgn_model_num_choices(model.m) << " choices, " << csgn_model_num_transitions(model.m)
                  << " transitions (constr " << seconds(constr) << " s)\n";
    }

    int code = kOk;
    for (std::size_t k = 0; k < props.size(); ++k) {
        ResultHandle r;
        try {
            check(model.m, props[k], o, defines, r);
        } catch (const Failure& f) {
            std::cerr << "error: " << props[k] << ": " << f.message << "\n";
            if (cfg.format == "json") doc["results"].push_back({{"property", props[k]}, {"error", f.message}});
            code = worse(code, kUsage);
            continue;
        }
        if (cfg.format == "json") {
            json j = json::parse(csgn_result_json(r.r));
            j["time"]["constr"] = constr;
            doc["results"].push_back(std::move(j));
        } else if (cfg.format == "csv") {
            print_csv_row(r.r, constr);
        } else {
            if (k) std::cout << "\n";
            print_human(r.r, constr);
        }
        if (!cfg.export_strategy.empty()) export_strategy(cfg.export_strategy, k, props.size(), r.r);
        code = worse(code, exit_for(r.r));
    }
    if (cfg.format == "json") std::cout << doc.dump(2) << "\n";
    return code;
}

struct SweepRange {
    std::string name;
    std::vector<std::string> values;
};

SweepRange parse_sweep(const std::string& spec) {
    static const std::regex re(R"(^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*([^.:]+(?:\.[0-9]+)?)\s*\.\.\s*([^:]+?)\s*(?::\s*(\S+))?\s*$)");
    std::smatch m;
    if (!std::regex_match(spec, m, re)) throw Failure{"bad --sweep '" + spec + "' (expected NAME=LO..HI[:STEP])"};
    SweepRange out;
    out.name = m[1];
    const std::string lo_s = m[2], hi_s = m[3], step_s = m[4].matched ? std::string(m[4]) : "1";
    auto is_int = [](const std::string& s) { return s.find_first_of(".eE") == std::string::npos; };
    double lo, hi, step;
    try {
        lo = std::stod(lo_s);
        hi = std::stod(hi_s);
        step = std::stod(step_s);
    } catch (const std::exception&) {
        throw Failure{"bad --sweep bounds in '" + spec + "'"};
    }
    if (!(step > 0) || hi < lo) throw Failure{"bad --sweep range in '" + spec + "'"};
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    const bool ints = is_int(lo_s) && is_int(step_s);
    for (std::size_t k = 0; k < n; ++k) {
        double v = lo + static_cast<double>(k) * step;
        if (ints) {
            out.values.push_back(std::to_string(static_cast<long long>(std::llround(v))));
        } else {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            out.values.push_back(buf);
        }
    }
    return out;
}

int sweep(const RunConfig& cfg) {
    auto props = property_list(cfg);
    SweepRange range = parse_sweep(cfg.sweep);
    const csgn_options o = make_options(cfg);
    for (auto& c : cfg.consts)
        if (name_of(c) == range.name) throw Failure{"'" + range.name + "' is both swept and fixed by --const"};

    std::cout << (props.size() > 1 ? "property," : "") << range.name << ",v1,v2,sum,iterations,time\n";
    int code = kOk;
    for (const std::string& value : range.values) {
        std::vector<std::string> consts = cfg.consts;
        consts.push_back(range.name + "=" + value);
        ModelHandle model;
        std::vector<std::string> defines;
        load_model(cfg.model, consts, model, defines);
        bool on_property = false;
        for (auto& d : defines) on_property = on_property || name_of(d) == range.name;
        if (on_property) {
            const std::regex word("\\b" + range.name + "\\b");
            for (auto& p : props)
                if (!std::regex_search(p, word))
                    throw Failure{"sweep parameter '" + range.name + "' is neither a model constant nor used by '" + p +
                                  "'"};
        }
        for (std::size_t k = 0; k < props.size(); ++k) {
            ResultHandle r;
            check(model.m, props[k], o, defines, r);
            const double t = csgn_model_build_seconds(model.m) + csgn_result_mdp_seconds(r.r) + csgn_result_csg_seconds(r.r);
            if (props.size() > 1) std::cout << k + 1 << ",";
            std::cout << value << ",";
            if (csgn_result_is_nash(r.r))
                std::cout << fmt(csgn_result_player_value(r.r, 0)) << "," << fmt(csgn_result_player_value(r.r, 1)) << ","
                          << fmt(csgn_result_sum(r.r));
            else
                std::cout << ",," << fmt(csgn_result_numerical(r.r) ? csgn_result_value(r.r) : csgn_result_holds(r.r));
            std::cout << "," << csgn_result_iterations(r.r) << "," << seconds(t) << "\n";
            code = worse(code, exit_for(r.r));
        }
    }
    return code;
}

// "2,2,2;0,4,6" or a CSV file with one row per line.
std::vector<std::vector<std::string>> parse_matrix(const std::string& inline_text, const std::string& file) {
    std::string text = inline_text;
    char row_sep = ';';
    if (!file.empty()) {
        text = read_file(file);
        row_sep = '\n';
    }
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line, row_sep)) {
        std::vector<std::string> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            auto b = cell.find_first_not_of(" \t\r");
            auto e = cell.find_last_not_of(" \t\r");
            if (b == std::string::npos) throw Failure{"empty matrix entry"};
            row.push_back(cell.substr(b, e - b + 1));
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Failure{"empty matrix"};
    for (auto& r : rows)
        if (r.size() != rows[0].size()) throw Failure{"matrix rows have different lengths"};
    return rows;
}

std::string dist_text(const json& d) {
    std::string s = "(";
    for (std::size_t k = 0; k < d.size(); ++k) s += (k ? ", " : "") + d[k].get<std::string>();
    return s + ")";
}

int solve_nfg(const std::string& z1s, const std::string& z1f, const std::string& z2s, const std::string& z2f,
              bool eliminate, const std::string& format) {
    auto a = parse_matrix(z1s, z1f);
    auto b = parse_matrix(z2s, z2f);
    if (a.size() != b.size() || a[0].size() != b[0].size()) throw Failure{"Z1 and Z2 have different shapes"};
    std::vector<const char*> p1, p2;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[0].size(); ++j) {
            p1.push_back(a[i][j].c_str());
            p2.push_back(b[i][j].c_str());
        }
    char* out = nullptr;
    csgn_status st = csgn_solve_nfg(a.size(), a[0].size(), p1.data(), p2.data(), eliminate, &out);
    if (st != CSGN_OK) throw Failure{api_error(st)};
    json j = json::parse(out);
    csgn_string_free(out);
    if (format == "json") {
        std::cout << j.dump(2) << "\n";
        return kOk;
    }
    const auto& eqs = j["equilibria"];
    std::cout << eqs.size() << " equilibri" << (eqs.size() == 1 ? "um" : "a") << "\n";
    for (std::size_t k = 0; k < eqs.size(); ++k) {
        const auto& e = eqs[k];
        std::cout << "  [" << k + 1 << "] x=" << dist_text(e["x"]) << " y=" << dist_text(e["y"])
                  << " values=(" << e["u"].get<std::string>() << ", " << e["v"].get<std::string>() << ")"
                  << " sum=" << e["sum"].get<std::string>() << "\n";
    }
    const auto& s = j["swne_profile"];
    std::cout << "SWNE: [" << j["swne"].get<std::size_t>() + 1 << "] values=(" << s["u"].get<std::string>() << ", "
              << s["v"].get<std::string>() << ") sum=" << s["sum"].get<std::string>() << "\n";
    return kOk;
}

void add_run_options(CLI::App* app, RunConfig& cfg, bool sweep_required) {
    app->add_option("--model", cfg.model, "model file (guarded commands or explicit states)")->required();
    app->add_option("--const", cfg.consts, "constant override NAME=VALUE")->allow_extra_args(false);
    app->add_option("--property", cfg.properties, "property text")->allow_extra_args(false);
    app->add_option("--property-file", cfg.property_file, "file with one property per line");
    app->add_option("--epsilon", cfg.epsilon, "epsilon for the equilibrium check of --verify")->capture_default_str();
    app->add_option("--conv-epsilon", cfg.conv_epsilon, "value-iteration convergence bound")->capture_default_str();
    app->add_option("--max-iters", cfg.max_iters, "value-iteration limit")->capture_default_str();
    app->add_flag("--strict-assumptions", cfg.strict, "fail when the convergence assumption is violated");
    app->add_flag("--exact", cfg.exact, "rational value iteration");
    app->add_option("--trace", cfg.trace, "record this many iterations at the initial state");
    app->add_option("--export-strategy", cfg.export_strategy, "write the synthesised profile as JSON");
    app->add_flag("--verify", cfg.verify, "check the synthesised profile is an epsilon-equilibrium");
    app->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"human", "json", "csv"}));
    auto* s = app->add_option("--sweep", cfg.sweep, "NAME=LO..HI[:STEP] over a model constant or property bound");
    if (sweep_required) s->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nash equilibrium model checking for concurrent stochastic games"};
    app.require_subcommand(1);

    RunConfig run_cfg, sweep_cfg;
    auto* run_cmd = app.add_subcommand("run", "check properties on a model");
    add_run_options(run_cmd, run_cfg, false);
    auto* sweep_cmd = app.add_subcommand("sweep", "check properties over a parameter range (CSV)");
    add_run_options(sweep_cmd, sweep_cfg, true);

    std::string z1s, z1f, z2s, z2f, nfg_format = "human";
    bool eliminate = false;
    auto* nfg = app.add_subcommand("solve-nfg", "equilibria of a bimatrix game");
    nfg->add_option("--z1", z1s, "player 1 payoffs, rows separated by ';'");
    nfg->add_option("--z2", z2s, "player 2 payoffs, rows separated by ';'");
    nfg->add_option("--z1-file", z1f, "player 1 payoffs as CSV");
    nfg->add_option("--z2-file", z2f, "player 2 payoffs as CSV");
    nfg->add_flag("--eliminate-dominated", eliminate, "remove strictly dominated pure strategies first");
    nfg->add_option("--format", nfg_format, "output format")->check(CLI::IsMember({"human", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*run_cmd) return run_cfg.sweep.empty() ? run(run_cfg) : sweep(run_cfg);
        if (*sweep_cmd) return sweep(sweep_cfg);
        if (*nfg) {
            if (z1s.empty() == z1f.empty() || z2s.empty() == z2f.empty())
                throw Failure{"give each matrix with exactly one of --z1/--z1-file and --z2/--z2-file"};
            return solve_nfg(z1s, z1f, z2s, z2f, eliminate, nfg_format);
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
