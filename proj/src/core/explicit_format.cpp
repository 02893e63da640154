#include "csgnash/explicit_format.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "csgnash/error.hpp"

namespace csgnash {

namespace {

class LineCursor {
public:
    LineCursor(std::string_view text, int line) : text_(text), line_(line) {}

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool accept(std::string_view word) {
        skip_ws();
        if (text_.substr(pos_, word.size()) == word) {
            std::size_t end = pos_ + word.size();
            if (end < text_.size() && is_word(text_[end])) return false;
            pos_ = end;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) error(std::string("expected '") + c + "'");
    }
    std::string word() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_word(text_[pos_])) ++pos_;
        if (start == pos_) error("expected a name");
        return std::string(text_.substr(start, pos_ - start));
    }
    std::string quoted() {
        skip_ws();
        if (!accept('"')) error("expected a quoted string");
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != '"') ++pos_;
        if (pos_ >= text_.size()) error("unterminated string");
        std::string out(text_.substr(start, pos_ - start));
        ++pos_;
        return out;
    }
    bool peek_quote() {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == '"';
    }
    std::string number_token() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && (is_word(text_[pos_]) || text_[pos_] == '/' || text_[pos_] == '.' ||
                                       text_[pos_] == '-' || text_[pos_] == '+'))
            ++pos_;
        if (start == pos_) error("expected a number");
        return std::string(text_.substr(start, pos_ - start));
    }
    std::size_t index() {
        std::string tok = word();
        for (char c : tok)
            if (c < '0' || c > '9') error("expected a state index, got '" + tok + "'");
        return std::stoul(tok);
    }
    [[noreturn]] void error(const std::string& msg) {
        fail(ErrorCode::Syntax, msg, SourcePos{line_, static_cast<int>(pos_) + 1});
    }

private:
    static bool is_word(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    }
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_;
};

}  // namespace

Csg parse_explicit(const std::string& text) {
    CsgBuilder b;
    std::map<std::string, PlayerId> players;
    std::vector<std::string> player_order;
    std::map<std::string, ActionId> actions;
    std::map<std::string, std::size_t> rewards;
    struct StateDecl {
        std::string name;
        bool init = false;
        std::vector<std::string> labels;
    };
    std::map<std::size_t, StateDecl> states;
    struct RowDecl {
        std::size_t state;
        std::vector<ActionId> joint;
        std::vector<std::pair<StateId, Rational>> dist;
        int line;
    };
    std::vector<RowDecl> rows;
    struct RewardDecl {
        std::size_t reward;
        std::size_t state;
        bool is_action;
        std::vector<ActionId> joint;
        Rational value;
        int line;
    };
    std::vector<RewardDecl> reward_items;

    auto parse_joint = [&](LineCursor& cur) {
        std::vector<ActionId> joint;
        cur.expect('(');
        do {
            std::string a = cur.word();
            if (a == "_") {
                joint.push_back(kIdle);
            } else {
                auto it = actions.find(a);
                if (it == actions.end()) cur.error("unknown action '" + a + "'");
                joint.push_back(it->second);
            }
        } while (cur.accept(','));
        cur.expect(')');
        if (joint.size() != player_order.size()) cur.error("joint action has wrong arity");
        return joint;
    };

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto c = line.find("//"); c != std::string_view::npos) line = line.substr(0, c);
        if (auto c = line.find('#'); c != std::string_view::npos) line = line.substr(0, c);
        LineCursor cur(line, line_no);
        if (cur.at_end()) continue;
        if (cur.accept("players")) {
            if (!player_order.empty()) cur.error("players declared twice");
            while (!cur.at_end()) {
                std::string p = cur.word();
                players[p] = b.add_player(p);
                player_order.push_back(p);
            }
        } else if (cur.accept("actions")) {
            std::string p = cur.word();
            auto it = players.find(p);
            if (it == players.end()) cur.error("unknown player '" + p + "'");
            cur.expect(':');
            while (!cur.at_end()) {
                std::string a = cur.word();
                if (actions.count(a)) cur.error("action '" + a + "' declared twice");
                actions[a] = b.add_action(it->second, a);
            }
        } else if (cur.accept("state")) {
            std::size_t id = cur.index();
            StateDecl decl;
            if (cur.peek_quote()) decl.name = cur.quoted();
            if (cur.accept("init")) decl.init = true;
            cur.expect('{');
            while (!cur.accept('}')) {
                decl.labels.push_back(cur.word());
                cur.accept(',');
                if (cur.at_end()) cur.error("unterminated label set");
            }
            if (states.count(id)) cur.error("state " + std::to_string(id) + " declared twice");
            states[id] = std::move(decl);
        } else if (cur.accept("reward")) {
            std::string name = cur.quoted();
            auto [it, fresh] = rewards.try_emplace(name, 0);
            if (fresh) it->second = b.add_reward(name);
            if (cur.at_end()) continue;
            RewardDecl item{it->second, 0, false, {}, 0, line_no};
            if (cur.accept("state")) {
                item.state = cur.index();
            } else {
                item.state = cur.index();
                item.is_action = true;
                item.joint = parse_joint(cur);
            }
            cur.expect(':');
            item.value = parse_rational(cur.number_token());
            reward_items.push_back(std::move(item));
        } else {
            RowDecl row;
            row.line = line_no;
            row.state = cur.index();
            row.joint = parse_joint(cur);
            cur.expect('-');
            cur.expect('>');
            do {
                Rational p = parse_rational(cur.number_token());
                cur.expect(':');
                std::size_t t = cur.index();
                row.dist.emplace_back(static_cast<StateId>(t), p);
            } while (cur.accept('+'));
            if (!cur.at_end()) cur.error("trailing input");
            rows.push_back(std::move(row));
        }
    }
    if (player_order.empty()) fail(ErrorCode::Syntax, "missing 'players' line");
    if (states.empty()) fail(ErrorCode::Syntax, "no states declared");
    std::size_t num_states = states.rbegin()->first + 1;
    if (states.size() != num_states) fail(ErrorCode::Syntax, "state indices must be contiguous from 0");

    std::map<std::string, StateSet> label_sets;
    for (std::size_t s = 0; s < num_states; ++s) b.add_state();
    bool has_names = false;
    for (auto& [id, decl] : states) {
        if (decl.init) b.set_initial(static_cast<StateId>(id));
        if (!decl.name.empty()) has_names = true;
        for (auto& l : decl.labels) {
            auto& set = label_sets[l];
            set.resize(num_states, false);
            set[id] = true;
        }
    }
    if (has_names)
        for (auto& [id, decl] : states) b.set_state_name(static_cast<StateId>(id), decl.name.empty() ? std::to_string(id) : decl.name);
    for (auto& [name, set] : label_sets) b.add_label(name, std::move(set));

    std::map<std::pair<std::size_t, std::vector<ActionId>>, std::size_t> handles;
    for (auto& row : rows) {
        if (row.state >= num_states) fail(ErrorCode::Syntax, "transition from undeclared state", {row.line, 1});
        for (auto& [t, p] : row.dist)
            if (t >= num_states) fail(ErrorCode::Syntax, "transition to undeclared state", {row.line, 1});
        auto key = std::make_pair(row.state, row.joint);
        if (handles.count(key)) fail(ErrorCode::Syntax, "duplicate joint action", {row.line, 1});
        handles[key] = b.add_row(static_cast<StateId>(row.state), row.joint, row.dist);
    }
    for (auto& item : reward_items) {
        if (item.state >= num_states) fail(ErrorCode::Syntax, "reward for undeclared state", {item.line, 1});
        if (!item.is_action) {
            b.set_state_reward(item.reward, static_cast<StateId>(item.state), item.value);
        } else {
            auto it = handles.find({item.state, item.joint});
            if (it == handles.end()) fail(ErrorCode::Syntax, "reward for undefined joint action", {item.line, 1});
            b.set_action_reward(item.reward, it->second, item.value);
        }
    }
    return b.finish(true);
}

Csg load_explicit(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_explicit(ss.str());
}

std::string write_explicit(const Csg& g) {
    std::ostringstream out;
    out << "players";
    for (PlayerId p = 0; p < g.num_players(); ++p) out << ' ' << g.player_name(p);
    out << '\n';
    for (PlayerId p = 0; p < g.num_players(); ++p) {
        out << "actions " << g.player_name(p) << ':';
        for (ActionId a : g.alphabet(p)) out << ' ' << g.action_name(a);
        out << '\n';
    }
    std::vector<bool> is_init(g.num_states(), false);
    for (StateId s : g.initial_states()) is_init[s] = true;
    for (StateId s = 0; s < g.num_states(); ++s) {
        out << "state " << s << " \"" << g.describe_state(s) << '"';
        if (is_init[s]) out << " init";
        out << " {";
        bool first = true;
        for (auto& [name, set] : g.labels()) {
            if (!set[s]) continue;
            if (!first) out << ',';
            out << name;
            first = false;
        }
        out << "}\n";
    }
    for (StateId s = 0; s < g.num_states(); ++s) {
        for (std::size_t r = g.row_begin(s); r < g.row_end(s); ++r) {
            out << s << ' ' << g.joint_action_text(r) << " ->";
            for (std::size_t t = g.trans_begin(r); t < g.trans_end(r); ++t) {
                if (t != g.trans_begin(r)) out << " +";
                out << ' ' << (g.exact() ? to_string(g.exact_prob(t)) : to_string(rational_from_double(g.prob(t))))
                    << ':' << g.succ(t);
            }
            out << '\n';
        }
    }
    for (const auto& rs : g.rewards()) {
        out << "reward \"" << rs.name << "\"\n";
        for (StateId s = 0; s < g.num_states(); ++s)
            if (rs.state[s] != 0) out << "reward \"" << rs.name << "\" state " << s << " : " << to_string(rs.state[s]) << '\n';
        for (StateId s = 0; s < g.num_states(); ++s)
            for (std::size_t r = g.row_begin(s); r < g.row_end(s); ++r)
                if (rs.action[r] != 0)
                    out << "reward \"" << rs.name << "\" " << s << ' ' << g.joint_action_text(r) << " : "
                        << to_string(rs.action[r]) << '\n';
    }
    return out.str();
}

void save_explicit(const Csg& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
    out << write_explicit(g);
}

}  // namespace csgnash
