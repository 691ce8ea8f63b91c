#include "planloop/interp/interpreter.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace planloop::interp {

namespace {

// Unwinds expression evaluation and statement execution out to execute(),
// where it becomes a RuntimeFault outcome. Never escapes this module.
struct EvalFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Evaluator {
public:
    Evaluator(const Bindings& bindings, const env::EnvSession& session)
        : bindings_(bindings), session_(session) {}

    Value eval(const plan::Expr& expr) const {
        return std::visit([this](const auto& node) { return eval_node(node); }, expr.node);
    }

    std::string eval_text(const plan::Expr& expr) const { return eval(expr).to_text(); }

private:
    Value eval_node(const plan::Literal& node) const { return node.value; }

    Value eval_node(const plan::VarRef& node) const { return lookup(node.name); }

    Value eval_node(const plan::Interpolate& node) const {
        std::string out;
        for (std::size_t i = 0; i < node.vars.size(); ++i) {
            out += node.chunks[i];
            out += lookup(node.vars[i]).to_text();
        }
        out += node.chunks.back();
        return out;
    }

    Value eval_node(const plan::Compare& node) const {
        Value lhs = eval(*node.lhs);
        Value rhs = eval(*node.rhs);
        switch (node.op) {
        case plan::CompareOp::Eq: return lhs == rhs;
        case plan::CompareOp::Ne: return lhs != rhs;
        case plan::CompareOp::In: return contains(rhs, lhs);
        case plan::CompareOp::NotIn: return !contains(rhs, lhs);
        }
        throw EvalFault("unreachable comparison operator");
    }

    Value eval_node(const plan::BoolExpr& node) const {
        switch (node.kind) {
        case plan::BoolKind::Not: return !eval(*node.operands[0]).truthy();
        case plan::BoolKind::And:
            for (const auto& operand : node.operands)
                if (!eval(*operand).truthy()) return false;
            return true;
        case plan::BoolKind::Or:
            for (const auto& operand : node.operands)
                if (eval(*operand).truthy()) return true;
            return false;
        }
        throw EvalFault("unreachable boolean kind");
    }

    // Membership: substring on text, element equality on lists.
    bool contains(const Value& haystack, const Value& needle) const {
        if (haystack.is_text())
            return haystack.as_text().find(needle.to_text()) != std::string::npos;
        if (haystack.is_list()) {
            const auto& items = haystack.as_list();
            return std::find(items.begin(), items.end(), needle) != items.end();
        }
        throw EvalFault("'in' needs text or a list on the right, got " + haystack.to_text());
    }

    // Plan bindings shadow builtins, matching assignment semantics.
    Value lookup(const std::string& name) const {
        auto it = bindings_.find(name);
        if (it != bindings_.end()) return it->second;
        if (name == "holding")
            return session_.state.held ? Value(*session_.state.held) : Value::none();
        if (name == "location") return Value(session_.state.agent_location);
        if (name == "last_observation") {
            if (!session_.interaction_log.empty())
                return Value(session_.interaction_log.back().second);
            return Value(session_.initial_observation);
        }
        if (name == "agent") return Value(std::string("agent"));
        throw EvalFault("variable '" + name + "' is unbound");
    }

    const Bindings& bindings_;
    const env::EnvSession& session_;
};

// What the statement walker reports upward: keep going, or stop the episode
// with this status.
struct Halt {
    OutcomeStatus status;
    std::optional<AssertionReport> report;
    std::string fault;
};

class Runner {
public:
    Runner(const plan::PlanAst& ast, env::EnvSession& session, const AskResolver& ask,
           const ExecuteOptions& options)
        : ast_(ast), session_(session), ask_(ask), cap_(options.action_cap),
          on_nothing_happens_(options.on_nothing_happens),
          on_assertion_failure_(options.on_assertion_failure) {
        if (options.prior) state_ = *options.prior;
        state_.bindings.clear();
        state_.actions_taken = session.step_count;

        start_from_ = std::clamp(options.start_from, 1, std::max(1, ast.subgoal_count()));
        while (start_from_ > 1 && (!options.prior || !options.prior->checkpoints.count(start_from_)))
            --start_from_;
        if (start_from_ > 1) state_.bindings = options.prior->checkpoints.at(start_from_).bindings;

        context_.initial_observation = session.initial_observation;
    }

    EpisodeOutcome run() {
        std::optional<Halt> halt;
        if (env::goal_met(session_)) {
            halt = Halt{OutcomeStatus::Success, std::nullopt, ""};
        } else {
            try {
                halt = run_subgoals();
            } catch (const EvalFault& fault) {
                halt = fault_halt(fault.what());
            }
        }
        if (!halt) {
            // Every sub-goal ran, nothing tripped, yet the task is unsolved:
            // hand the refiner a report rather than claiming success.
            halt = fault_halt("the plan finished without errors, but the task is not complete");
        }

        EpisodeOutcome outcome;
        outcome.status = halt->status;
        outcome.report = std::move(halt->report);
        outcome.fault = std::move(halt->fault);
        outcome.context = std::move(context_);
        outcome.final_state = std::move(state_);
        return outcome;
    }

private:
    std::optional<Halt> run_subgoals() {
        for (const plan::SubGoal& subgoal : ast_.subgoals) {
            if (subgoal.index < start_from_) continue;
            state_.current_subgoal = subgoal.index;
            state_.checkpoints[subgoal.index] = {state_.bindings, state_.actions_taken};

            if (auto halt = run_statements(subgoal.body)) return halt;

            if (subgoal.assertion) {
                bool passed =
                    Evaluator(state_.bindings, session_).eval(subgoal.assertion->condition).truthy();
                if (!passed && on_assertion_failure_) {
                    std::string message =
                        Evaluator(state_.bindings, session_).eval_text(subgoal.assertion->message);
                    FailedAction failed{subgoal.index, subgoal.line, "", {}, message};
                    if (auto substitute = on_assertion_failure_(failed)) {
                        if (auto halt = act(substitute->first, substitute->second, nullptr))
                            return halt;
                        passed = Evaluator(state_.bindings, session_)
                                     .eval(subgoal.assertion->condition)
                                     .truthy();
                    }
                }
                if (!passed) {
                    std::string message =
                        Evaluator(state_.bindings, session_).eval_text(subgoal.assertion->message);
                    return Halt{OutcomeStatus::AssertionFailed,
                                build_report(subgoal.index, message, session_), ""};
                }
            }
        }
        return std::nullopt;
    }

    std::optional<Halt> run_statements(const std::vector<plan::Statement>& statements) {
        for (const plan::Statement& statement : statements) {
            line_ = statement.line;
            auto halt = std::visit([this](const auto& node) { return run_statement(node); },
                                   statement.node);
            if (halt) return halt;
        }
        return std::nullopt;
    }

    // One cap-checked environment action: step, count, log, goal-check.
    std::optional<Halt> act(const std::string& action, const std::vector<std::string>& args,
                            std::string* observation_out) {
        if (state_.actions_taken >= cap_)
            return Halt{OutcomeStatus::ActionCapReached, std::nullopt, ""};

        auto observation = env::step(session_, action, args);
        if (!observation.ok()) throw EvalFault(observation.error());

        ++state_.actions_taken;
        context_.interactions.push_back(session_.interaction_log.back());
        if (observation_out) *observation_out = observation.value();

        if (env::goal_met(session_)) return Halt{OutcomeStatus::Success, std::nullopt, ""};
        return std::nullopt;
    }

    std::optional<Halt> run_statement(const plan::ActionCall& node) {
        Evaluator eval(state_.bindings, session_);
        std::vector<std::string> args;
        args.reserve(node.args.size());
        for (const plan::Expr& arg : node.args) args.push_back(eval.eval_text(arg));

        std::string observation;
        std::optional<Halt> halt = act(node.action, args, &observation);

        if (!halt && on_nothing_happens_ && observation == "Nothing happens.") {
            FailedAction failed{state_.current_subgoal, line_, node.action, args, observation};
            if (auto substitute = on_nothing_happens_(failed)) {
                halt = act(substitute->first, substitute->second, nullptr);
                if (!halt) halt = act(node.action, args, &observation); // retry the original once
            }
        }

        if (node.binding) state_.bindings[*node.binding] = Value(observation);
        return halt;
    }

    std::optional<Halt> run_statement(const plan::AskLlm& node) {
        Evaluator eval(state_.bindings, session_);
        std::string question = eval.eval_text(node.question);
        auto answer = ask_(question);
        if (!answer.ok()) throw EvalFault("ask_llm failed: " + answer.error());

        std::string text = answer.value();
        auto first = text.find_first_not_of(" \t\r\n");
        auto last = text.find_last_not_of(" \t\r\n");
        text = first == std::string::npos ? "" : text.substr(first, last - first + 1);
        if (text.empty()) throw EvalFault("ask_llm returned an empty answer");
        if (text.find('\n') != std::string::npos)
            throw EvalFault("ask_llm returned a multi-line answer: " + text);

        state_.bindings[node.binding] = Value(text);
        return std::nullopt;
    }

    std::optional<Halt> run_statement(const plan::Assign& node) {
        Evaluator eval(state_.bindings, session_);
        state_.bindings[node.binding] = eval.eval(node.value);
        return std::nullopt;
    }

    std::optional<Halt> run_statement(const plan::ForEach& node) {
        Value iterable = Evaluator(state_.bindings, session_).eval(node.iterable);
        if (!iterable.is_list())
            throw EvalFault("for loop needs a list, got " + iterable.to_text());

        for (const Value& item : iterable.as_list()) {
            state_.bindings[node.var] = item;
            if (auto halt = run_statements(node.body)) return halt;
            if (node.break_when &&
                Evaluator(state_.bindings, session_).eval(*node.break_when).truthy())
                break;
        }
        return std::nullopt;
    }

    std::optional<Halt> run_statement(const plan::IfElse& node) {
        bool taken = Evaluator(state_.bindings, session_).eval(node.condition).truthy();
        return run_statements(taken ? node.then_body : node.else_body);
    }

    std::optional<Halt> run_statement(const plan::AssertStep&) {
        // The parser only admits assertions as sub-goal closers, which
        // run_subgoals evaluates itself.
        throw EvalFault("assert statement outside a sub-goal tail");
    }

    Halt fault_halt(const std::string& message) {
        return Halt{OutcomeStatus::RuntimeFault,
                    build_report(state_.current_subgoal, message + ".", session_), message};
    }

    const plan::PlanAst& ast_;
    env::EnvSession& session_;
    const AskResolver& ask_;
    int cap_;
    const SubstituteProvider& on_nothing_happens_;
    const SubstituteProvider& on_assertion_failure_;
    int start_from_ = 1;
    int line_ = 0; // source line of the statement being executed
    ExecutionState state_;
    EpisodeContext context_;
};

} // namespace

const char* outcome_status_name(OutcomeStatus status) {
    switch (status) {
    case OutcomeStatus::Success: return "success";
    case OutcomeStatus::AssertionFailed: return "assertion_failed";
    case OutcomeStatus::ActionCapReached: return "action_cap_reached";
    case OutcomeStatus::RuntimeFault: return "runtime_fault";
    }
    return "runtime_fault";
}

std::string AssertionReport::to_text() const {
    std::ostringstream out;
    out << "Error in [Step " << failing_subgoal << "]: " << message
        << " The last three interactions before the error were:";
    for (const auto& [command, observation] : last_interactions)
        out << "\n> " << command << "\n" << observation;
    out << "\nI am at " << agent_location << " and holding "
        << (held_object ? *held_object : "None") << ".";
    return out.str();
}

AssertionReport build_report(int failing_subgoal, const std::string& message,
                             const env::EnvSession& session) {
    env::Introspection look = env::introspect(session);
    AssertionReport report;
    report.failing_subgoal = failing_subgoal;
    report.message = message;
    report.agent_location = look.agent_location;
    report.held_object = look.held;
    report.last_interactions = look.last_interactions;
    return report;
}

Result<bool> evaluate_assertion(const plan::Expr& condition, const Bindings& bindings,
                                const env::EnvSession& session) {
    try {
        return Evaluator(bindings, session).eval(condition).truthy();
    } catch (const EvalFault& fault) {
        return Result<bool>::failure(fault.what());
    }
}

EpisodeOutcome execute(const plan::PlanAst& ast, env::EnvSession& session,
                       const AskResolver& ask_llm, const ExecuteOptions& options) {
    return Runner(ast, session, ask_llm, options).run();
}

} // namespace planloop::interp
