#pragma once

#include "planloop/env/household.hpp"
#include "planloop/interp/interpreter.hpp"
#include "planloop/llm/gateway.hpp"
#include "planloop/plan/ast.hpp"
#include "planloop/plan/validate.hpp"
#include "planloop/result.hpp"

#include <optional>
#include <string>
#include <vector>

namespace planloop::controller {

// Open: plan once, execute, never intervene. Implicit: keep the plan but let
// the model substitute single actions when one misfires. Explicit: full
// refine-then-resume.
enum class LoopMode { Open, Implicit, Explicit };

const char* loop_mode_name(LoopMode mode);
std::optional<LoopMode> loop_mode_from_name(const std::string& name);

struct ControllerConfig {
    LoopMode mode = LoopMode::Explicit;
    int max_refinement_rounds = 4;
    int max_repair_attempts = 2; // code-check retries per generated plan
    int action_cap = 50;
    std::string exemplar; // sample solution text shown in planning prompts
};

struct EpisodeRecord {
    env::TaskInstance task;
    LoopMode mode = LoopMode::Explicit;
    interp::OutcomeStatus outcome = interp::OutcomeStatus::RuntimeFault;
    bool plan_generation_failed = false;
    std::string failure_detail;
    std::vector<plan::PlanAst> plans; // initial + one entry per revision
    std::vector<int> start_froms;     // resume point chosen for each revision
    std::vector<interp::EpisodeContext> round_contexts; // one per execute() call
    std::optional<interp::AssertionReport> last_report;
    int refinement_rounds = 0;
    int llm_calls = 0;
    int env_actions = 0;

    bool success() const { return outcome == interp::OutcomeStatus::Success; }
};

// ---------------------------------------------------------------------------
// Response parsing. Model output is untrusted text; these helpers carve out
// the usable part and fail soft.
// ---------------------------------------------------------------------------

// The `def solution...` block of a response: from the def line through the
// last indented (or blank) line that follows it.
Result<std::string> extract_solution_function(const std::string& response);

struct CodeCheckReply {
    bool affirmative = false;          // Question 1 answered yes
    std::optional<std::string> code;   // Question 2's function, when present
};

// Tolerates both bare "Yes\n<code>" responses and labeled
// "Question 1: ... Question 2: ..." ones; garbage means "no change".
CodeCheckReply parse_code_check_response(const std::string& response);

// First unsigned integer anywhere in the response.
std::optional<int> parse_start_from_response(const std::string& response);

// "open('fridge 1')" → {"open", {"fridge 1"}}; anything that is not a
// known-catalog call with the right arity is rejected.
std::optional<interp::SubstituteAction> parse_substitute_action(
    const std::string& response, const plan::ActionCatalog& catalog);

// Receptacle ids joined ", " in the prompt ordering.
std::string receptacle_list_text(const env::HouseholdState& state);

// ---------------------------------------------------------------------------
// Operations.
// ---------------------------------------------------------------------------

// Renders the ask_llm prompt (appending the observation when the question
// does not already quote it), completes, and normalizes the answer to the
// first non-empty line. Empty answers are errors.
Result<std::string> resolve_ask_llm(const std::string& question,
                                    const std::string& recent_observation,
                                    const llm::TemplateEngine& engine, llm::Backend& backend);

struct PlanGeneration {
    std::optional<plan::PlanAst> ast; // empty: plan_generation_failed
    int llm_calls = 0;
    std::string error;
};

// initial_planning prompt → candidate → code-check repair loop while the
// candidate fails to parse or validate, up to max_repair_attempts.
PlanGeneration generate_initial_plan(const ControllerConfig& config,
                                     const env::EnvSession& session,
                                     const llm::TemplateEngine& engine, llm::Backend& backend);

struct Refinement {
    std::optional<plan::PlanAst> ast;
    int start_from = 1; // N+1 when the revision is structurally identical
    int llm_calls = 0;
    std::string error;
};

// refinement prompt (with the report embedded) → revised plan → start_from.
// The model's start_from answer is range-guarded to [1, N]; out-of-range or
// unparseable answers fall back to the structural diff. An identical revision
// skips the start_from query and returns the N+1 sentinel.
Refinement out_of_plan_refine(const ControllerConfig& config, const env::EnvSession& session,
                              const interp::AssertionReport& report,
                              const plan::PlanAst& previous, const llm::TemplateEngine& engine,
                              llm::Backend& backend);

// One full episode in the configured mode. llm_calls counts every backend
// completion; env_actions counts every environment step across rounds.
EpisodeRecord run_episode(const ControllerConfig& config, env::EnvSession& session,
                          const llm::TemplateEngine& engine, llm::Backend& backend);

} // namespace planloop::controller
