#include "planloop/controller/controller.hpp"

#include "planloop/plan/diff.hpp"
#include "planloop/plan/parse.hpp"
#include "planloop/plan/print.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace planloop::controller {

namespace {

std::string trim(const std::string& text) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::string trim_right(const std::string& text) {
    auto last = text.find_last_not_of(" \t\r\n");
    return last == std::string::npos ? "" : text.substr(0, last + 1);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream stream(text);
    while (std::getline(stream, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

bool is_indented_or_blank(const std::string& line) {
    return line.empty() || line[0] == ' ' || line[0] == '\t';
}

const plan::ActionCatalog& household_plan_catalog() {
    static const plan::ActionCatalog catalog = env::to_plan_catalog(env::household_catalog());
    return catalog;
}

std::string quote_args(const std::vector<std::string>& args) {
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += "'" + args[i] + "'";
    }
    return out;
}

// Parse, then validate: the candidate is usable only when both stages are
// clean of errors (warnings pass).
struct CandidateCheck {
    std::optional<plan::PlanAst> ast;
    std::string diagnosis; // what the code_check prompt shows as <error_msg>
};

CandidateCheck check_candidate(const std::string& function_text) {
    auto parsed = plan::parse_plan(function_text);
    if (!parsed.ok()) return {std::nullopt, parsed.error().to_string()};
    auto diagnostics = plan::validate_plan(parsed.value(), household_plan_catalog());
    if (plan::has_errors(diagnostics))
        return {std::nullopt, plan::render_diagnostics(diagnostics)};
    return {parsed.value(), ""};
}

struct RepairOutcome {
    std::optional<plan::PlanAst> ast;
    int llm_calls = 0;
    std::string error;
};

// Code-check repair loop: while the candidate is broken, show it to the model
// with the diagnostics and adopt the correction when Question 1 says yes.
RepairOutcome parse_and_repair(std::string response_text, const ControllerConfig& config,
                               const llm::TemplateEngine& engine, llm::Backend& backend) {
    RepairOutcome outcome;
    std::string diagnosis;
    for (int attempt = 0; attempt <= config.max_repair_attempts; ++attempt) {
        std::string function_text;
        auto extracted = extract_solution_function(response_text);
        if (extracted.ok()) {
            function_text = extracted.value();
            CandidateCheck checked = check_candidate(function_text);
            if (checked.ast) {
                outcome.ast = std::move(checked.ast);
                return outcome;
            }
            diagnosis = checked.diagnosis;
        } else {
            function_text = response_text;
            diagnosis = extracted.error();
        }
        if (attempt == config.max_repair_attempts) break;

        auto prompt = engine.render(llm::PromptKind::CodeCheck,
                                    {{"solution_func", function_text}, {"error_msg", diagnosis}});
        if (!prompt.ok()) {
            outcome.error = "plan_generation_failed: " + prompt.error();
            return outcome;
        }
        ++outcome.llm_calls;
        auto reply = backend.complete({prompt.value(), 2048, 0.0, {}});
        if (!reply.ok()) {
            outcome.error = "plan_generation_failed: " + reply.error();
            return outcome;
        }
        CodeCheckReply checked = parse_code_check_response(reply.value());
        if (checked.affirmative && checked.code) response_text = *checked.code;
        // otherwise keep the candidate; the next round burns budget and fails
        // the same way, which is the honest outcome for an unhelpful model.
    }
    outcome.error = "plan_generation_failed: " + diagnosis;
    return outcome;
}

} // namespace

const char* loop_mode_name(LoopMode mode) {
    switch (mode) {
    case LoopMode::Open: return "open";
    case LoopMode::Implicit: return "implicit";
    case LoopMode::Explicit: return "explicit";
    }
    return "explicit";
}

std::optional<LoopMode> loop_mode_from_name(const std::string& name) {
    if (name == "open") return LoopMode::Open;
    if (name == "implicit") return LoopMode::Implicit;
    if (name == "explicit") return LoopMode::Explicit;
    return std::nullopt;
}

Result<std::string> extract_solution_function(const std::string& response) {
    std::vector<std::string> lines = split_lines(response);
    std::size_t begin = 0;
    for (; begin < lines.size(); ++begin)
        if (trim(lines[begin]).rfind("def solution", 0) == 0) break;
    if (begin == lines.size())
        return Result<std::string>::failure("response contains no solution function");

    std::size_t end = begin + 1;
    while (end < lines.size() && is_indented_or_blank(lines[end])) ++end;
    while (end > begin + 1 && trim(lines[end - 1]).empty()) --end; // drop trailing blanks

    std::string function_text;
    for (std::size_t i = begin; i < end; ++i) function_text += trim_right(lines[i]) + "\n";
    return function_text;
}

CodeCheckReply parse_code_check_response(const std::string& response) {
    CodeCheckReply reply;
    auto extracted = extract_solution_function(response);
    if (extracted.ok()) reply.code = extracted.value();

    // Decision lines live before the function (or anywhere in a code-free
    // response): the first line whose content starts with yes/no wins.
    for (const std::string& raw : split_lines(response)) {
        std::string line = trim(raw);
        if (line.rfind("def solution", 0) == 0) break;
        for (const char* label : {"Question 1:", "Answer:", "A1:"})
            if (line.rfind(label, 0) == 0) line = trim(line.substr(std::string(label).size()));
        std::string lowered;
        for (char c : line) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (lowered.rfind("yes", 0) == 0) {
            reply.affirmative = true;
            return reply;
        }
        if (lowered.rfind("no", 0) == 0) return reply;
    }
    return reply;
}

std::optional<int> parse_start_from_response(const std::string& response) {
    for (std::size_t i = 0; i < response.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(response[i]))) continue;
        std::size_t end = i;
        while (end < response.size() && std::isdigit(static_cast<unsigned char>(response[end])))
            ++end;
        return std::stoi(response.substr(i, end - i));
    }
    return std::nullopt;
}

std::optional<interp::SubstituteAction> parse_substitute_action(
    const std::string& response, const plan::ActionCatalog& catalog) {
    // First non-empty line carries the call.
    std::string line;
    for (const std::string& candidate : split_lines(response))
        if (!trim(candidate).empty()) {
            line = trim(candidate);
            break;
        }

    std::size_t open = line.find('(');
    std::size_t close = line.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        return std::nullopt;

    std::string name = trim(line.substr(0, open));
    std::vector<std::string> args;
    std::string inside = line.substr(open + 1, close - open - 1);
    std::istringstream stream(inside);
    std::string piece;
    while (std::getline(stream, piece, ',')) {
        piece = trim(piece);
        if (piece.size() >= 2 && (piece.front() == '\'' || piece.front() == '"') &&
            piece.back() == piece.front())
            piece = piece.substr(1, piece.size() - 2);
        if (!piece.empty()) args.push_back(piece);
    }

    for (const plan::ActionSpec& spec : catalog)
        if (spec.name == name && spec.arity == static_cast<int>(args.size()))
            return interp::SubstituteAction{name, args};
    return std::nullopt;
}

std::string receptacle_list_text(const env::HouseholdState& state) {
    std::string out;
    for (const std::string& id : env::receptacle_ids(state)) {
        if (!out.empty()) out += ", ";
        out += id;
    }
    return out;
}

Result<std::string> resolve_ask_llm(const std::string& question,
                                    const std::string& recent_observation,
                                    const llm::TemplateEngine& engine, llm::Backend& backend) {
    std::string full_question = question;
    if (!recent_observation.empty() && question.find(recent_observation) == std::string::npos)
        full_question += "\nThe latest observation was: " + recent_observation;

    auto prompt = engine.render(llm::PromptKind::AskLlm, {{"question", full_question}});
    if (!prompt.ok()) return Result<std::string>::failure(prompt.error());
    auto reply = backend.complete({prompt.value(), 64, 0.0, {}});
    if (!reply.ok()) return Result<std::string>::failure(reply.error());

    for (const std::string& line : split_lines(reply.value())) {
        std::string value = trim(line);
        if (!value.empty()) return value;
    }
    return Result<std::string>::failure("ask_llm returned an empty answer");
}

PlanGeneration generate_initial_plan(const ControllerConfig& config,
                                     const env::EnvSession& session,
                                     const llm::TemplateEngine& engine, llm::Backend& backend) {
    PlanGeneration generation;
    auto prompt = engine.render(llm::PromptKind::InitialPlanning,
                                {{"sample", config.exemplar},
                                 {"receptacle_list", receptacle_list_text(session.state)},
                                 {"task", session.task.goal_text}});
    if (!prompt.ok()) {
        generation.error = "plan_generation_failed: " + prompt.error();
        return generation;
    }
    ++generation.llm_calls;
    auto reply = backend.complete({prompt.value(), 2048, 0.0, {}});
    if (!reply.ok()) {
        generation.error = "plan_generation_failed: " + reply.error();
        return generation;
    }

    RepairOutcome repaired = parse_and_repair(reply.value(), config, engine, backend);
    generation.llm_calls += repaired.llm_calls;
    generation.ast = std::move(repaired.ast);
    generation.error = repaired.error;
    return generation;
}

Refinement out_of_plan_refine(const ControllerConfig& config, const env::EnvSession& session,
                              const interp::AssertionReport& report,
                              const plan::PlanAst& previous, const llm::TemplateEngine& engine,
                              llm::Backend& backend) {
    Refinement refinement;
    auto prompt = engine.render(llm::PromptKind::Refinement,
                                {{"sample", config.exemplar},
                                 {"receptacle_list", receptacle_list_text(session.state)},
                                 {"task", session.task.goal_text},
                                 {"error_msg", report.to_text()}});
    if (!prompt.ok()) {
        refinement.error = "plan_generation_failed: " + prompt.error();
        return refinement;
    }
    ++refinement.llm_calls;
    auto reply = backend.complete({prompt.value(), 2048, 0.0, {}});
    if (!reply.ok()) {
        refinement.error = "plan_generation_failed: " + reply.error();
        return refinement;
    }

    RepairOutcome repaired = parse_and_repair(reply.value(), config, engine, backend);
    refinement.llm_calls += repaired.llm_calls;
    if (!repaired.ast) {
        refinement.error = repaired.error;
        return refinement;
    }
    refinement.ast = std::move(repaired.ast);

    const int subgoals = refinement.ast->subgoal_count();
    int divergence = plan::diff_first_divergence(previous, *refinement.ast);
    if (divergence > subgoals && previous.subgoal_count() == subgoals) {
        // Structurally identical revision: report the sentinel; the caller
        // decides that another round would be unproductive.
        refinement.start_from = subgoals + 1;
        return refinement;
    }

    auto resume_prompt =
        engine.render(llm::PromptKind::StartFrom,
                      {{"previous_solution", plan::render_plan(previous)},
                       {"revised_solution", plan::render_plan(*refinement.ast)}});
    if (!resume_prompt.ok()) {
        refinement.start_from = std::min(divergence, subgoals);
        return refinement;
    }
    ++refinement.llm_calls;
    auto resume_reply = backend.complete({resume_prompt.value(), 16, 0.0, {}});
    std::optional<int> answered =
        resume_reply.ok() ? parse_start_from_response(resume_reply.value()) : std::nullopt;
    if (answered && *answered >= 1 && *answered <= subgoals)
        refinement.start_from = *answered;
    else
        refinement.start_from = std::min(divergence, subgoals);
    return refinement;
}

EpisodeRecord run_episode(const ControllerConfig& config, env::EnvSession& session,
                          const llm::TemplateEngine& engine, llm::Backend& backend) {
    EpisodeRecord record;
    record.task = session.task;
    record.mode = config.mode;

    PlanGeneration generation = generate_initial_plan(config, session, engine, backend);
    record.llm_calls += generation.llm_calls;
    if (!generation.ast) {
        record.plan_generation_failed = true;
        record.failure_detail = generation.error;
        return record;
    }
    plan::PlanAst current = std::move(*generation.ast);
    record.plans.push_back(current);

    interp::AskResolver ask = [&](const std::string& question) -> Result<std::string> {
        ++record.llm_calls;
        const std::string observation = session.interaction_log.empty()
                                            ? session.initial_observation
                                            : session.interaction_log.back().second;
        return resolve_ask_llm(question, observation, engine, backend);
    };

    // Implicit mode: one substitute-action query per static statement, for
    // the whole episode.
    std::map<int, bool> substituted_lines;
    interp::SubstituteProvider substitute;
    if (config.mode == LoopMode::Implicit) {
        substitute = [&](const interp::FailedAction& failed)
            -> std::optional<interp::SubstituteAction> {
            if (substituted_lines[failed.line]) return std::nullopt;
            substituted_lines[failed.line] = true;

            std::string question;
            if (failed.action.empty())
                question = "The assertion for step " + std::to_string(failed.subgoal) +
                           " failed: " + failed.detail +
                           " Respond with one substitute action call that could repair the"
                           " situation.";
            else
                question = "The action " + failed.action + "(" + quote_args(failed.args) +
                           ") produced 'Nothing happens.'. Respond with one substitute action"
                           " call that could achieve its intent.";

            auto prompt = engine.render(llm::PromptKind::AskLlm, {{"question", question}});
            if (!prompt.ok()) return std::nullopt;
            ++record.llm_calls;
            auto reply = backend.complete({prompt.value(), 64, 0.0, {}});
            if (!reply.ok()) return std::nullopt;
            return parse_substitute_action(reply.value(), household_plan_catalog());
        };
    }

    interp::ExecuteOptions options;
    options.action_cap = config.action_cap;
    options.on_nothing_happens = substitute;
    options.on_assertion_failure = substitute;

    interp::EpisodeOutcome outcome = interp::execute(current, session, ask, options);
    record.round_contexts.push_back(outcome.context);
    record.env_actions += static_cast<int>(outcome.context.interactions.size());
    if (outcome.report) record.last_report = outcome.report;

    if (config.mode == LoopMode::Explicit) {
        while ((outcome.status == interp::OutcomeStatus::AssertionFailed ||
                outcome.status == interp::OutcomeStatus::RuntimeFault) &&
               record.refinement_rounds < config.max_refinement_rounds) {
            Refinement refined =
                out_of_plan_refine(config, session, *outcome.report, current, engine, backend);
            record.llm_calls += refined.llm_calls;
            if (!refined.ast) {
                record.plan_generation_failed = true;
                record.failure_detail = refined.error;
                break;
            }
            if (refined.start_from > refined.ast->subgoal_count()) {
                record.failure_detail = "refinement produced an identical plan";
                break;
            }

            current = std::move(*refined.ast);
            record.plans.push_back(current);
            record.start_froms.push_back(refined.start_from);
            ++record.refinement_rounds;

            interp::ExecutionState prior = std::move(outcome.final_state);
            interp::ExecuteOptions resume;
            resume.action_cap = config.action_cap;
            resume.start_from = refined.start_from;
            resume.prior = &prior;
            outcome = interp::execute(current, session, ask, resume);
            record.round_contexts.push_back(outcome.context);
            record.env_actions += static_cast<int>(outcome.context.interactions.size());
            if (outcome.report) record.last_report = outcome.report;
        }
    }

    record.outcome = outcome.status;
    return record;
}

} // namespace planloop::controller
