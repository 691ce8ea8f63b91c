#include "planloop/plan/validate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace planloop::plan {

namespace {

// Session views readable by any plan without an explicit binding.
const std::set<std::string> kBuiltins = {"agent", "holding", "location", "last_observation"};

struct Location {
    int subgoal = 0;
    int statement = 0;
};

struct AskRecord {
    std::string name;
    Location loc;
    bool used = false;
};

class Validator {
public:
    explicit Validator(const ActionCatalog& catalog) {
        for (const ActionSpec& spec : catalog) arity_[spec.name] = spec.arity;
    }

    std::vector<Diagnostic> run(const PlanAst& ast) {
        bound_ = kBuiltins;
        for (const SubGoal& sg : ast.subgoals) {
            ask_bound_this_subgoal_.clear();
            int ordinal = 0;
            for (const Statement& stmt : sg.body)
                visit_statement(stmt, {sg.index, ++ordinal});
            if (sg.assertion) {
                Location loc{sg.index, static_cast<int>(sg.body.size()) + 1};
                visit_expr(sg.assertion->condition, loc);
                visit_expr(sg.assertion->message, loc);
            }
        }
        for (const AskRecord& rec : asks_)
            if (!rec.used)
                warn(rec.loc, "ask_llm result '" + rec.name + "' is never used");
        std::stable_sort(diags_.begin(), diags_.end(), [](const Diagnostic& a, const Diagnostic& b) {
            return std::tie(a.subgoal, a.statement) < std::tie(b.subgoal, b.statement);
        });
        return std::move(diags_);
    }

private:
    void error(Location loc, std::string message) {
        diags_.push_back({Severity::Error, loc.subgoal, loc.statement, std::move(message)});
    }
    void warn(Location loc, std::string message) {
        diags_.push_back({Severity::Warning, loc.subgoal, loc.statement, std::move(message)});
    }

    void read_var(const std::string& name, Location loc) {
        if (auto it = live_asks_.find(name); it != live_asks_.end()) asks_[it->second].used = true;
        if (!bound_.count(name)) error(loc, "variable '" + name + "' read before binding");
    }

    void bind(const std::string& name, Location loc, bool via_ask) {
        if (ask_bound_this_subgoal_.count(name))
            error(loc, "ask_llm result '" + name + "' is re-bound within sub-goal " +
                           std::to_string(loc.subgoal));
        if (via_ask) {
            ask_bound_this_subgoal_.insert(name);
            live_asks_[name] = asks_.size();
            asks_.push_back({name, loc, false});
        } else {
            live_asks_.erase(name);
        }
        bound_.insert(name);
    }

    void visit_expr(const Expr& e, Location loc) {
        struct Visitor {
            Validator& self;
            Location loc;
            void operator()(const Literal&) const {}
            void operator()(const VarRef& var) const { self.read_var(var.name, loc); }
            void operator()(const Interpolate& interp) const {
                for (const std::string& name : interp.vars) self.read_var(name, loc);
            }
            void operator()(const Compare& cmp) const {
                self.visit_expr(*cmp.lhs, loc);
                self.visit_expr(*cmp.rhs, loc);
            }
            void operator()(const BoolExpr& b) const {
                for (const ExprPtr& operand : b.operands) self.visit_expr(*operand, loc);
            }
        };
        std::visit(Visitor{*this, loc}, e.node);
    }

    void visit_statement(const Statement& stmt, Location loc) {
        struct Visitor {
            Validator& self;
            Location loc;
            void operator()(const ActionCall& call) const {
                auto it = self.arity_.find(call.action);
                if (it == self.arity_.end()) {
                    self.error(loc, "unknown action '" + call.action + "'");
                } else if (static_cast<int>(call.args.size()) != it->second) {
                    self.error(loc, "action '" + call.action + "' expects " +
                                        std::to_string(it->second) + " argument" +
                                        (it->second == 1 ? "" : "s") + ", got " +
                                        std::to_string(call.args.size()));
                }
                for (const Expr& arg : call.args) self.visit_expr(arg, loc);
                if (call.binding) self.bind(*call.binding, loc, false);
            }
            void operator()(const AskLlm& ask) const {
                self.visit_expr(ask.question, loc);
                self.bind(ask.binding, loc, true);
            }
            void operator()(const Assign& assign) const {
                self.visit_expr(assign.value, loc);
                self.bind(assign.binding, loc, false);
            }
            void operator()(const ForEach& loop) const {
                self.visit_expr(loop.iterable, loc);
                if (const auto* lit = std::get_if<Literal>(&loop.iterable.node);
                    lit && lit->value.is_list() && lit->value.as_list().empty())
                    self.warn(loc, "for loop over an empty literal list never runs");
                self.bind(loop.var, loc, false);
                for (const Statement& inner : loop.body) self.visit_statement(inner, loc);
                if (loop.break_when) self.visit_expr(*loop.break_when, loc);
            }
            void operator()(const IfElse& branch) const {
                self.visit_expr(branch.condition, loc);
                for (const Statement& inner : branch.then_body) self.visit_statement(inner, loc);
                for (const Statement& inner : branch.else_body) self.visit_statement(inner, loc);
            }
            void operator()(const AssertStep& step) const {
                self.visit_expr(step.condition, loc);
                self.visit_expr(step.message, loc);
            }
        };
        std::visit(Visitor{*this, loc}, stmt.node);
    }

    std::map<std::string, int> arity_;
    std::set<std::string> bound_;
    std::set<std::string> ask_bound_this_subgoal_;
    std::map<std::string, std::size_t> live_asks_;
    std::vector<AskRecord> asks_;
    std::vector<Diagnostic> diags_;
};

} // namespace

std::vector<Diagnostic> validate_plan(const PlanAst& ast, const ActionCatalog& catalog) {
    return Validator(catalog).run(ast);
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string render_diagnostics(const std::vector<Diagnostic>& diags) {
    std::ostringstream out;
    for (const Diagnostic& d : diags) {
        out << (d.severity == Severity::Error ? "error " : "warning ") << d.subgoal << ":"
            << d.statement << " " << d.message << "\n";
    }
    return out.str();
}

} // namespace planloop::plan
