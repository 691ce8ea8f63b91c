#pragma once

#include "planloop/env/household.hpp"
#include "planloop/plan/ast.hpp"
#include "planloop/result.hpp"
#include "planloop/value.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace planloop::interp {

using Bindings = std::map<std::string, Value>;

// Snapshot taken at a sub-goal's entry; what a later resume restores.
struct Checkpoint {
    Bindings bindings;
    int actions_taken = 0;
};

struct ExecutionState {
    Bindings bindings;
    int current_subgoal = 1;
    int actions_taken = 0; // environment actions issued so far in the episode
    std::map<int, Checkpoint> checkpoints;
};

// Trajectory of one execute() call: the initial room observation plus every
// (surface command, observation) pair in order.
struct EpisodeContext {
    std::string initial_observation;
    std::vector<std::pair<std::string, std::string>> interactions;
};

struct AssertionReport {
    int failing_subgoal = 0;
    std::string message;
    std::string agent_location;
    std::optional<std::string> held_object;
    // ≤3 (command, observation) pairs, oldest first.
    std::vector<std::pair<std::string, std::string>> last_interactions;

    // The refinement-prompt payload:
    //   Error in [Step k]: <message> The last three interactions before the
    //   error were:
    //   > command
    //   observation
    //   ...
    //   I am at <location> and holding <None|object>.
    std::string to_text() const;
};

enum class OutcomeStatus {
    Success,
    AssertionFailed,
    ActionCapReached,
    RuntimeFault,
};

const char* outcome_status_name(OutcomeStatus status);

struct EpisodeOutcome {
    OutcomeStatus status = OutcomeStatus::RuntimeFault;
    // Present for AssertionFailed, and for RuntimeFault (synthesized so the
    // refiner always has a report to work from).
    std::optional<AssertionReport> report;
    std::string fault; // RuntimeFault detail
    EpisodeContext context;
    ExecutionState final_state;
};

// How in-plan ask_llm(question) queries are answered. The controller wires
// this to the gateway; tests supply a lambda.
using AskResolver = std::function<Result<std::string>(const std::string& question)>;

// A statement-level failure offered to the substitute hooks: an ActionCall
// that observed "Nothing happens.", or an assertion that evaluated false
// (action empty, detail = the rendered message).
struct FailedAction {
    int subgoal = 0;
    int line = 0; // source line of the statement; keys once-per-statement rules
    std::string action;
    std::vector<std::string> args;
    std::string detail;
};

using SubstituteAction = std::pair<std::string, std::vector<std::string>>;

// Implicit-closed-loop escape hatch: may hand back one action to run in
// place. After a substitute, a failed ActionCall is retried once and a failed
// assertion is re-evaluated once. Substitutes never rebind plan variables.
using SubstituteProvider =
    std::function<std::optional<SubstituteAction>(const FailedAction& failed)>;

struct ExecuteOptions {
    int start_from = 1;
    int action_cap = 50;
    // Prior execution state whose checkpoint seeds a resume. Required when
    // start_from > 1; if the exact index was never checkpointed, the resume
    // falls back to the highest checkpointed index below it.
    const ExecutionState* prior = nullptr;
    SubstituteProvider on_nothing_happens;
    SubstituteProvider on_assertion_failure;
};

// Runs the plan against the live session. Sub-goals before start_from are
// skipped outright — no environment actions are replayed — with bindings
// restored from the prior checkpoint. The episode halts as soon as the goal
// predicate holds, when an assertion fails, or when the action cap is hit.
EpisodeOutcome execute(const plan::PlanAst& ast, env::EnvSession& session,
                       const AskResolver& ask_llm, const ExecuteOptions& options = {});

// Report payload for a failure at `failing_subgoal`, populated from session
// introspection (location, held object, last ≤3 interactions).
AssertionReport build_report(int failing_subgoal, const std::string& message,
                             const env::EnvSession& session);

// Pure evaluation of an assertion condition over plan bindings plus the
// session's read-only builtins (holding, location, last_observation).
Result<bool> evaluate_assertion(const plan::Expr& condition, const Bindings& bindings,
                                const env::EnvSession& session);

} // namespace planloop::interp
