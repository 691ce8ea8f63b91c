#pragma once

#include "planloop/value.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace planloop::plan {

// ---------------------------------------------------------------------------
// Expressions. Side-effect free; only statements touch the environment.
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class CompareOp {
    Eq,     // ==
    Ne,     // !=
    In,     // membership (list rhs) or substring containment (text rhs)
    NotIn,
};

enum class BoolKind { And, Or, Not };

struct Literal {
    Value value;
    bool operator==(const Literal&) const = default;
};

struct VarRef {
    std::string name;
    bool operator==(const VarRef&) const = default;
};

// f'...{var}...' — chunks.size() == vars.size() + 1, interleaved as
// chunks[0] vars[0] chunks[1] vars[1] ... chunks[n].
struct Interpolate {
    std::vector<std::string> chunks;
    std::vector<std::string> vars;
    bool operator==(const Interpolate&) const = default;
};

struct Compare {
    CompareOp op;
    ExprPtr lhs;
    ExprPtr rhs;
    bool operator==(const Compare& other) const;
};

struct BoolExpr {
    BoolKind kind;
    std::vector<ExprPtr> operands; // Not has exactly one
    bool operator==(const BoolExpr& other) const;
};

struct Expr {
    std::variant<Literal, VarRef, Interpolate, Compare, BoolExpr> node;
    bool operator==(const Expr& other) const { return node == other.node; }
};

inline bool Compare::operator==(const Compare& other) const {
    return op == other.op && *lhs == *other.lhs && *rhs == *other.rhs;
}

inline bool BoolExpr::operator==(const BoolExpr& other) const {
    if (kind != other.kind || operands.size() != other.operands.size()) return false;
    for (std::size_t i = 0; i < operands.size(); ++i)
        if (!(*operands[i] == *other.operands[i])) return false;
    return true;
}

inline Expr make_literal(Value v) { return Expr{Literal{std::move(v)}}; }
inline Expr make_var(std::string name) { return Expr{VarRef{std::move(name)}}; }
inline ExprPtr box(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

// ---------------------------------------------------------------------------
// Statements.
// ---------------------------------------------------------------------------

struct Statement;

struct ActionCall {
    std::optional<std::string> binding; // obs = goto(recep)
    std::string action;
    std::vector<Expr> args;
    bool operator==(const ActionCall&) const = default;
};

struct AskLlm {
    std::string binding; // mandatory
    Expr question;
    bool operator==(const AskLlm&) const = default;
};

struct Assign {
    std::string binding;
    Expr value;
    bool operator==(const Assign&) const = default;
};

struct ForEach {
    std::string var;
    Expr iterable;
    std::vector<Statement> body;
    std::optional<Expr> break_when; // trailing `if cond: break`
    bool operator==(const ForEach& other) const;
};

struct IfElse {
    Expr condition;
    std::vector<Statement> then_body;
    std::vector<Statement> else_body;
    bool operator==(const IfElse& other) const;
};

struct AssertStep {
    Expr condition;
    Expr message; // argument of report(...)
    bool operator==(const AssertStep&) const = default;
};

struct Statement {
    std::variant<ActionCall, AskLlm, Assign, ForEach, IfElse, AssertStep> node;
    int line = 0; // source line, 0 for synthesized nodes; excluded from ==

    bool operator==(const Statement& other) const { return node == other.node; }
};

inline bool ForEach::operator==(const ForEach& other) const {
    return var == other.var && iterable == other.iterable && body == other.body &&
           break_when == other.break_when;
}

inline bool IfElse::operator==(const IfElse& other) const {
    return condition == other.condition && then_body == other.then_body &&
           else_body == other.else_body;
}

// ---------------------------------------------------------------------------
// Sub-goals and plans.
// ---------------------------------------------------------------------------

struct SubGoal {
    int index = 0;       // 1..N, contiguous
    std::string comment; // text after `[Step k]`, non-empty
    std::vector<Statement> body;
    std::optional<AssertStep> assertion; // absent only for the final sub-goal
    int line = 0;

    bool operator==(const SubGoal& other) const {
        return index == other.index && comment == other.comment && body == other.body &&
               assertion == other.assertion;
    }
};

struct PlanAst {
    std::string name = "solution";
    int start_from_default = 1;
    std::vector<std::string> preamble; // general-plan comment lines
    std::vector<SubGoal> subgoals;

    bool operator==(const PlanAst&) const = default;

    int subgoal_count() const { return static_cast<int>(subgoals.size()); }
};

struct ParseError {
    int line = 0;
    int column = 0;
    std::string message;

    std::string to_string() const {
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
               message;
    }
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    int subgoal = 0;   // sub-goal index
    int statement = 0; // 1-based ordinal of the top-level statement
    std::string message;
};

// `SEVERITY step:ordinal message`, one per line.
std::string render_diagnostics(const std::vector<Diagnostic>& diags);

} // namespace planloop::plan
