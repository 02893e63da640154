#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "csgnash/csg.hpp"
#include "csgnash/expr.hpp"

namespace csgnash {

// Guarded-command game description. Example:
//
//   csg
//   player p1 user1 endplayer
//   player p2 user2 endplayer
//   const double q2 = 0.75;
//   module user1
//     s1 : [0..1] init 0;
//     [w1] s1=0 -> true;
//     [t1,w2] s1=0 -> (s1'=1);
//     [t1,t2] s1=0 -> q2:(s1'=1) + 1-q2:true;
//   endmodule
//   module user2 = user1 [s1=s2, t1=t2, w1=w2, t2=t1, w2=w1] endmodule
//   rewards "r1" [t1,w2] true : 1; endrewards
//   label "sent1" = s1=1;

struct ConstantDecl {
    std::string name;
    ValueType type = ValueType::Int;  // Rat for `double`
    ExprPtr value;                    // null when left undefined
    SourcePos pos;
};

struct VariableDecl {
    std::string name;
    bool is_bool = false;
    ExprPtr low, high;  // null for booleans
    ExprPtr init;       // null means the lower bound (false)
    SourcePos pos;
};

struct Assignment {
    std::string variable;
    ExprPtr value;
    SourcePos pos;
};

struct UpdateAlternative {
    ExprPtr probability;  // null means 1
    std::vector<Assignment> assignments;
};

struct Command {
    // One label, or a list whose entries belong to distinct players.
    std::vector<std::string> actions;
    ExprPtr guard;
    std::vector<UpdateAlternative> updates;
    SourcePos pos;
};

struct ModuleDecl {
    std::string name;
    std::vector<VariableDecl> variables;
    std::vector<Command> commands;
    SourcePos pos;
};

struct PlayerDecl {
    std::string name;
    std::vector<std::string> modules;
    std::vector<std::string> actions;  // listed as [a] in the player block
    SourcePos pos;
};

struct RewardItem {
    std::vector<std::string> actions;  // empty: state reward
    ExprPtr guard;
    ExprPtr value;
    SourcePos pos;
};

struct RewardDecl {
    std::string name;
    std::vector<RewardItem> items;
    SourcePos pos;
};

struct LabelDecl {
    std::string name;
    ExprPtr predicate;
    SourcePos pos;
};

struct ModelAst {
    std::vector<ConstantDecl> constants;
    std::vector<PlayerDecl> players;
    std::vector<ModuleDecl> modules;  // renamed modules already expanded
    std::vector<RewardDecl> rewards;
    std::vector<LabelDecl> labels;
    // Owner player index of every action label, inferred at parse time.
    std::map<std::string, std::size_t> action_owner;
    // Actions per player in alphabet order.
    std::vector<std::vector<std::string>> alphabets;
};

// Parses and checks structure (players, ownership, variable writes).
ModelAst parse_model(std::string_view text);

// Evaluates constants; `overrides` maps names to expression text.
std::map<std::string, Value> evaluate_constants(const ModelAst& ast, const std::map<std::string, std::string>& overrides);

struct Model {
    Csg game;
    std::map<std::string, Value> constants;
};

// Breadth-first construction of the reachable game.
Model build_model(const ModelAst& ast, const std::map<std::string, std::string>& overrides = {});
Csg build_csg(const ModelAst& ast, const std::map<std::string, std::string>& overrides = {});

// Loads a guarded-command model or an explicit-state game (detected from the
// first keyword: `players` selects the explicit format).
Model load_model_text(const std::string& text, const std::map<std::string, std::string>& overrides = {});
Model load_model_file(const std::string& path, const std::map<std::string, std::string>& overrides = {});

}  // namespace csgnash
