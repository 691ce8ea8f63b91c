#include "planloop/plan/print.hpp"

#include <sstream>

namespace planloop::plan {

namespace {

// Precedence levels: or < and < not < comparison < primary.
enum Prec { kOr = 1, kAnd = 2, kNot = 3, kCompare = 4, kPrimary = 5 };

std::string pad(int depth) { return std::string(static_cast<std::size_t>(depth) * 4, ' '); }

std::string render_value(const Value& v) {
    if (v.is_none()) return "None";
    if (v.is_bool()) return v.as_bool() ? "True" : "False";
    if (v.is_int()) return std::to_string(v.as_int());
    if (v.is_text()) return "'" + v.as_text() + "'";
    std::string out = "[";
    const auto& items = v.as_list();
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += render_value(items[i]);
    }
    return out + "]";
}

int precedence_of(const Expr& e) {
    struct Visitor {
        int operator()(const Literal&) const { return kPrimary; }
        int operator()(const VarRef&) const { return kPrimary; }
        int operator()(const Interpolate&) const { return kPrimary; }
        int operator()(const Compare&) const { return kCompare; }
        int operator()(const BoolExpr& b) const {
            switch (b.kind) {
            case BoolKind::Or: return kOr;
            case BoolKind::And: return kAnd;
            case BoolKind::Not: return kNot;
            }
            return kNot;
        }
    };
    return std::visit(Visitor{}, e.node);
}

std::string render(const Expr& e, int min_prec);

std::string render_node(const Expr& e) {
    struct Visitor {
        std::string operator()(const Literal& lit) const { return render_value(lit.value); }
        std::string operator()(const VarRef& var) const { return var.name; }
        std::string operator()(const Interpolate& interp) const {
            std::string out = "f'";
            for (std::size_t i = 0; i < interp.vars.size(); ++i)
                out += interp.chunks[i] + "{" + interp.vars[i] + "}";
            return out + interp.chunks.back() + "'";
        }
        std::string operator()(const Compare& cmp) const {
            const char* op = nullptr;
            switch (cmp.op) {
            case CompareOp::Eq: op = " == "; break;
            case CompareOp::Ne: op = " != "; break;
            case CompareOp::In: op = " in "; break;
            case CompareOp::NotIn: op = " not in "; break;
            }
            return render(*cmp.lhs, kPrimary) + op + render(*cmp.rhs, kPrimary);
        }
        std::string operator()(const BoolExpr& b) const {
            if (b.kind == BoolKind::Not) return "not " + render(*b.operands[0], kNot);
            const char* joiner = b.kind == BoolKind::And ? " and " : " or ";
            int child_prec = b.kind == BoolKind::And ? kNot : kAnd;
            std::string out;
            for (std::size_t i = 0; i < b.operands.size(); ++i) {
                if (i) out += joiner;
                out += render(*b.operands[i], child_prec);
            }
            return out;
        }
    };
    return std::visit(Visitor{}, e.node);
}

std::string render(const Expr& e, int min_prec) {
    std::string text = render_node(e);
    if (precedence_of(e) < min_prec) return "(" + text + ")";
    return text;
}

void render_stmt(std::ostream& out, const Statement& stmt, int depth);

void render_body(std::ostream& out, const std::vector<Statement>& body, int depth) {
    for (const Statement& stmt : body) render_stmt(out, stmt, depth);
}

void render_stmt(std::ostream& out, const Statement& stmt, int depth) {
    struct Visitor {
        std::ostream& out;
        int depth;
        void operator()(const ActionCall& call) const {
            out << pad(depth);
            if (call.binding) out << *call.binding << " = ";
            out << call.action << "(";
            for (std::size_t i = 0; i < call.args.size(); ++i) {
                if (i) out << ", ";
                out << render(call.args[i], kOr);
            }
            out << ")\n";
        }
        void operator()(const AskLlm& ask) const {
            out << pad(depth) << ask.binding << " = ask_llm(" << render(ask.question, kOr)
                << ")\n";
        }
        void operator()(const Assign& assign) const {
            out << pad(depth) << assign.binding << " = " << render(assign.value, kOr) << "\n";
        }
        void operator()(const ForEach& loop) const {
            out << pad(depth) << "for " << loop.var << " in " << render(loop.iterable, kOr)
                << ":\n";
            render_body(out, loop.body, depth + 1);
            if (loop.break_when)
                out << pad(depth + 1) << "if " << render(*loop.break_when, kOr) << ": break\n";
        }
        void operator()(const IfElse& branch) const {
            out << pad(depth) << "if " << render(branch.condition, kOr) << ":\n";
            render_body(out, branch.then_body, depth + 1);
            if (!branch.else_body.empty()) {
                out << pad(depth) << "else:\n";
                render_body(out, branch.else_body, depth + 1);
            }
        }
        void operator()(const AssertStep& step) const {
            out << pad(depth) << "assert " << render(step.condition, kOr) << ", report("
                << render(step.message, kOr) << ")\n";
        }
    };
    std::visit(Visitor{out, depth}, stmt.node);
}

} // namespace

std::string render_expr(const Expr& expr) { return render(expr, kOr); }

std::string render_statement(const Statement& stmt, int depth) {
    std::ostringstream out;
    render_stmt(out, stmt, depth);
    return out.str();
}

std::string render_subgoal(const SubGoal& sg) {
    std::ostringstream out;
    out << pad(1) << "# [Step " << sg.index << "] " << sg.comment << "\n";
    render_body(out, sg.body, 1);
    if (sg.assertion) {
        Statement stmt;
        stmt.node = *sg.assertion;
        render_stmt(out, stmt, 1);
    }
    return out.str();
}

std::string render_plan(const PlanAst& ast) {
    std::ostringstream out;
    out << "def " << ast.name << "(agent, start_from=" << ast.start_from_default << "):\n";
    for (const std::string& line : ast.preamble) {
        out << pad(1) << "#";
        if (!line.empty()) out << " " << line;
        out << "\n";
    }
    for (const SubGoal& sg : ast.subgoals) out << render_subgoal(sg);
    return out.str();
}

} // namespace planloop::plan
