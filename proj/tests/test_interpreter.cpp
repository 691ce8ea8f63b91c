#include <doctest.h>

#include "planloop/interp/interpreter.hpp"
#include "planloop/plan/parse.hpp"
#include "support/golden.hpp"
#include "support/oracle.hpp"

#include <string>
#include <vector>

using namespace planloop;
using namespace planloop::interp;

namespace {

constexpr unsigned kLettuceSeed = 2521;

plan::PlanAst parse_or_die(const std::string& source) {
    auto parsed = plan::parse_plan(source);
    std::string error = parsed.ok() ? "" : parsed.error().to_string();
    CAPTURE(error);
    REQUIRE(parsed.ok());
    return parsed.value();
}

// Resolver that always answers with the same identifier, counting calls.
struct CountingResolver {
    std::string answer;
    int calls = 0;
    AskResolver fn() {
        return [this](const std::string&) -> Result<std::string> {
            ++calls;
            return answer;
        };
    }
};

std::vector<std::string> commands(const EpisodeContext& ctx) {
    std::vector<std::string> out;
    for (const auto& [command, observation] : ctx.interactions) out.push_back(command);
    return out;
}

} // namespace

TEST_CASE("golden walkthrough fails at step 4 with a faithful report") {
    env::EnvSession session = env::make_session(env::TaskType::Clean, kLettuceSeed);
    plan::PlanAst initial = parse_or_die(testsupport::golden_initial_plan());
    CountingResolver resolver{"lettuce 1"};

    EpisodeOutcome outcome = execute(initial, session, resolver.fn());
    REQUIRE(outcome.status == OutcomeStatus::AssertionFailed);
    REQUIRE(outcome.report.has_value());
    CHECK(resolver.calls == 1);

    const AssertionReport& report = *outcome.report;
    CHECK(report.failing_subgoal == 4);
    CHECK(report.message == "I cannot clean lettuce 1 using the sinkbasin 1.");
    CHECK(report.agent_location == "countertop 2");
    REQUIRE(report.held_object.has_value());
    CHECK(*report.held_object == "lettuce 1");

    // Search loop: goto fridge, open fridge, goto countertop 1, goto
    // countertop 2; then take; then the doomed clean. Six actions.
    CHECK(outcome.final_state.actions_taken == 6);
    CHECK(session.step_count == 6);
    CHECK(commands(outcome.context) ==
          std::vector<std::string>{"go to fridge 1", "open fridge 1", "go to countertop 1",
                                   "go to countertop 2", "take lettuce 1 from countertop 2",
                                   "clean lettuce 1 with sinkbasin 1"});
    CHECK(outcome.context.initial_observation == session.initial_observation);

    // The report tail is the session's own log tail, most recent last.
    REQUIRE(report.last_interactions.size() == 3);
    for (int i = 0; i < 3; ++i)
        CHECK(report.last_interactions[i] == session.interaction_log[3 + i]);
    CHECK(report.last_interactions.back() ==
          std::pair<std::string, std::string>{"clean lettuce 1 with sinkbasin 1",
                                              "Nothing happens."});

    // Rendered payload, exactly as the refinement prompt will embed it.
    std::string expected = "Error in [Step 4]: I cannot clean lettuce 1 using the sinkbasin 1."
                           " The last three interactions before the error were:";
    for (const auto& [command, observation] : report.last_interactions)
        expected += "\n> " + command + "\n" + observation;
    expected += "\nI am at countertop 2 and holding lettuce 1.";
    CHECK(report.to_text() == expected);

    // Checkpoints cover every entered sub-goal; step 3's snapshot predates
    // the ask_llm binding.
    const auto& checkpoints = outcome.final_state.checkpoints;
    REQUIRE(checkpoints.size() == 4);
    CHECK(checkpoints.at(3).actions_taken == 4);
    CHECK(checkpoints.at(4).actions_taken == 5);
    CHECK(checkpoints.at(3).bindings.count("obs") == 1);
    CHECK(checkpoints.at(3).bindings.count("recep_list") == 1);
    CHECK(checkpoints.at(3).bindings.count("found") == 0);
    CHECK(outcome.final_state.bindings.at("found") == Value("lettuce 1"));
}

TEST_CASE("golden walkthrough resumes from step 3 without replaying the search") {
    env::EnvSession session = env::make_session(env::TaskType::Clean, kLettuceSeed);
    CountingResolver resolver{"lettuce 1"};

    plan::PlanAst initial = parse_or_die(testsupport::golden_initial_plan());
    EpisodeOutcome failed = execute(initial, session, resolver.fn());
    REQUIRE(failed.status == OutcomeStatus::AssertionFailed);

    plan::PlanAst revised = parse_or_die(testsupport::golden_revised_plan());
    ExecuteOptions options;
    options.start_from = 3;
    options.prior = &failed.final_state;
    EpisodeOutcome resumed = execute(revised, session, resolver.fn(), options);

    REQUIRE(resumed.status == OutcomeStatus::Success);
    CHECK(env::goal_met(session));
    CHECK(testsupport::brute_force_goal(session));
    CHECK(resolver.calls == 2); // the identifier is re-asked on resume

    // Exactly the revised sub-goals 3..6; nothing from the search replays.
    CHECK(commands(resumed.context) ==
          std::vector<std::string>{"take lettuce 1 from countertop 2", "go to sinkbasin 1",
                                   "clean lettuce 1 with sinkbasin 1", "go to diningtable 1",
                                   "put lettuce 1 in/on diningtable 1"});
    CHECK(session.step_count == 11);
    CHECK(resumed.final_state.actions_taken == 11);

    // The restored checkpoint supplied obs/recep_list; found was re-bound.
    CHECK(resumed.final_state.bindings.at("found") == Value("lettuce 1"));
    CHECK(resumed.final_state.bindings.count("obs") == 1);
}

TEST_CASE("executing the revised plan from scratch also succeeds") {
    env::EnvSession session = env::make_session(env::TaskType::Clean, kLettuceSeed);
    CountingResolver resolver{"lettuce 1"};
    plan::PlanAst revised = parse_or_die(testsupport::golden_revised_plan());

    EpisodeOutcome outcome = execute(revised, session, resolver.fn());
    REQUIRE(outcome.status == OutcomeStatus::Success);
    CHECK(outcome.final_state.actions_taken == 9);
    CHECK(env::goal_met(session));
}

TEST_CASE("execution is deterministic across identical fresh runs") {
    auto run = [] {
        env::EnvSession session = env::make_session(env::TaskType::Clean, kLettuceSeed);
        CountingResolver resolver{"lettuce 1"};
        plan::PlanAst initial = parse_or_die(testsupport::golden_initial_plan());
        return execute(initial, session, resolver.fn());
    };
    EpisodeOutcome first = run();
    EpisodeOutcome second = run();
    CHECK(first.status == second.status);
    CHECK(first.context.initial_observation == second.context.initial_observation);
    CHECK(first.context.interactions == second.context.interactions);
    CHECK(first.report->to_text() == second.report->to_text());
}

TEST_CASE("resume restores bindings and skips earlier sub-goals entirely") {
    const std::string source = R"(def solution(agent, start_from=1):
    # General plan: tour three receptacles.
    # [Step 1] Visit the first countertop.
    x = goto('countertop 1')
    assert location == 'countertop 1', report('Cannot reach countertop 1.')
    # [Step 2] Visit the second countertop.
    goto('countertop 2')
    assert location == 'countertop 2', report('Cannot reach countertop 2.')
    # [Step 3] Check the first observation is still around.
    y = goto('countertop 3')
    assert 'countertop 1' in x, report('Lost the first observation.')
)";
    plan::PlanAst plan_ast = parse_or_die(source);
    auto no_ask = [](const std::string&) -> Result<std::string> {
        return Result<std::string>::failure("no ask_llm expected");
    };

    env::EnvSession session = env::make_session(env::TaskType::Pick, 7);
    EpisodeOutcome full = execute(plan_ast, session, no_ask);
    // The tour completes but the task is untouched: routed to the refiner.
    REQUIRE(full.status == OutcomeStatus::RuntimeFault);
    CHECK(full.fault == "the plan finished without errors, but the task is not complete");
    REQUIRE(full.report.has_value());
    CHECK(full.report->failing_subgoal == 3);
    CHECK(session.step_count == 3);
    REQUIRE(full.final_state.checkpoints.size() == 3);

    SUBCASE("start_from=2 replays only sub-goals 2..3") {
        ExecuteOptions options;
        options.start_from = 2;
        options.prior = &full.final_state;
        EpisodeOutcome resumed = execute(plan_ast, session, no_ask, options);
        CHECK(commands(resumed.context) ==
              std::vector<std::string>{"go to countertop 2", "go to countertop 3"});
        CHECK(session.step_count == 5);
        // x came back from the checkpoint, so step 3's assertion passed.
        CHECK(resumed.status == OutcomeStatus::RuntimeFault);
        CHECK(resumed.final_state.bindings.at("x") ==
              full.final_state.checkpoints.at(2).bindings.at("x"));
    }

    SUBCASE("a missing checkpoint falls back to the nearest earlier one") {
        ExecutionState pruned = full.final_state;
        pruned.checkpoints.erase(3);
        ExecuteOptions options;
        options.start_from = 3;
        options.prior = &pruned;
        EpisodeOutcome resumed = execute(plan_ast, session, no_ask, options);
        CHECK(commands(resumed.context) ==
              std::vector<std::string>{"go to countertop 2", "go to countertop 3"});
    }

    SUBCASE("start_from beyond the last sub-goal clamps to the last") {
        ExecuteOptions options;
        options.start_from = 9;
        options.prior = &full.final_state;
        EpisodeOutcome resumed = execute(plan_ast, session, no_ask, options);
        CHECK(commands(resumed.context) == std::vector<std::string>{"go to countertop 3"});
    }
}

TEST_CASE("the action cap ends the episode before the next action") {
    const std::string source = R"(def solution(agent, start_from=1):
    # General plan: wander the kitchen.
    # [Step 1] Visit five receptacles.
    for recep in ['countertop 1', 'countertop 2', 'countertop 3', 'fridge 1', 'garbagecan 1']:
        obs = goto(recep)
    assert location == 'garbagecan 1', report('The tour was cut short.')
)";
    plan::PlanAst plan_ast = parse_or_die(source);
    auto no_ask = [](const std::string&) -> Result<std::string> {
        return Result<std::string>::failure("no ask_llm expected");
    };

    SUBCASE("cap 0 means zero actions") {
        env::EnvSession session = env::make_session(env::TaskType::Heat, 3);
        ExecuteOptions options;
        options.action_cap = 0;
        EpisodeOutcome outcome = execute(plan_ast, session, no_ask, options);
        CHECK(outcome.status == OutcomeStatus::ActionCapReached);
        CHECK(outcome.final_state.actions_taken == 0);
        CHECK(session.step_count == 0);
    }
    SUBCASE("cap 3 stops mid-loop") {
        env::EnvSession session = env::make_session(env::TaskType::Heat, 3);
        ExecuteOptions options;
        options.action_cap = 3;
        EpisodeOutcome outcome = execute(plan_ast, session, no_ask, options);
        CHECK(outcome.status == OutcomeStatus::ActionCapReached);
        CHECK(outcome.final_state.actions_taken == 3);
        CHECK(session.step_count == 3);
        CHECK(outcome.final_state.actions_taken <= 3);
    }
}

TEST_CASE("short histories shrink the report tail") {
    const std::string source = R"(def solution(agent, start_from=1):
    # General plan: look for a banana in the fridge.
    # [Step 1] Check the fridge.
    obs = goto('fridge 1')
    assert 'banana' in obs, report('There is no banana here.')
)";
    env::EnvSession session = env::make_session(env::TaskType::Cool, 5);
    auto no_ask = [](const std::string&) -> Result<std::string> {
        return Result<std::string>::failure("no ask_llm expected");
    };
    EpisodeOutcome outcome = execute(parse_or_die(source), session, no_ask);
    REQUIRE(outcome.status == OutcomeStatus::AssertionFailed);
    REQUIRE(outcome.report->last_interactions.size() == 1);
    CHECK(outcome.report->last_interactions[0].first == "go to fridge 1");
    CHECK(outcome.report->to_text().find("> go to fridge 1\n") != std::string::npos);
}

TEST_CASE("ask_llm failures surface as runtime faults with reports") {
    const std::string source = R"(def solution(agent, start_from=1):
    # General plan: ask a question.
    # [Step 1] Ask for an identifier.
    found = ask_llm('Which mug should I take?')
    assert found != '', report('No identifier.')
)";
    plan::PlanAst plan_ast = parse_or_die(source);

    SUBCASE("resolver error") {
        env::EnvSession session = env::make_session(env::TaskType::Pick, 1);
        auto ask = [](const std::string&) -> Result<std::string> {
            return Result<std::string>::failure("queue exhausted");
        };
        EpisodeOutcome outcome = execute(plan_ast, session, ask);
        REQUIRE(outcome.status == OutcomeStatus::RuntimeFault);
        CHECK(outcome.fault.find("ask_llm failed") != std::string::npos);
        CHECK(outcome.report.has_value());
        CHECK(outcome.report->failing_subgoal == 1);
    }
    SUBCASE("empty answer") {
        env::EnvSession session = env::make_session(env::TaskType::Pick, 1);
        auto ask = [](const std::string&) -> Result<std::string> {
            return std::string("  \n ");
        };
        EpisodeOutcome outcome = execute(plan_ast, session, ask);
        REQUIRE(outcome.status == OutcomeStatus::RuntimeFault);
        CHECK(outcome.fault.find("empty answer") != std::string::npos);
    }
    SUBCASE("multi-line answer") {
        env::EnvSession session = env::make_session(env::TaskType::Pick, 1);
        auto ask = [](const std::string&) -> Result<std::string> {
            return std::string("mug 1\nmug 2");
        };
        EpisodeOutcome outcome = execute(plan_ast, session, ask);
        REQUIRE(outcome.status == OutcomeStatus::RuntimeFault);
        CHECK(outcome.fault.find("multi-line") != std::string::npos);
    }
    SUBCASE("whitespace is trimmed from good answers") {
        env::EnvSession session = env::make_session(env::TaskType::Pick, 1);
        auto ask = [](const std::string&) -> Result<std::string> {
            return std::string("  mug 1 \n");
        };
        EpisodeOutcome outcome = execute(plan_ast, session, ask);
        CHECK(outcome.final_state.bindings.at("found") == Value("mug 1"));
    }
}

TEST_CASE("reading an unbound variable is a runtime fault") {
    const std::string source = R"(def solution(agent, start_from=1):
    # General plan: trip over a missing name.
    # [Step 1] Use a variable that was never bound.
    x = mystery
)";
    env::EnvSession session = env::make_session(env::TaskType::Pick, 2);
    auto no_ask = [](const std::string&) -> Result<std::string> {
        return Result<std::string>::failure("no ask_llm expected");
    };
    EpisodeOutcome outcome = execute(parse_or_die(source), session, no_ask);
    REQUIRE(outcome.status == OutcomeStatus::RuntimeFault);
    CHECK(outcome.fault.find("'mystery' is unbound") != std::string::npos);
}

TEST_CASE("evaluate_assertion matches the documented examples") {
    env::EnvSession session = env::make_session(env::TaskType::Clean, kLettuceSeed);

    SUBCASE("substring membership against last_observation") {
        // Fresh session: last_observation falls back to the room description.
        auto cond = plan::Expr{plan::Compare{plan::CompareOp::In,
                                             plan::box(plan::make_literal(Value("middle of a room"))),
                                             plan::box(plan::make_var("last_observation"))}};
        auto result = evaluate_assertion(cond, {}, session);
        REQUIRE(result.ok());
        CHECK(result.value());

        REQUIRE(env::step(session, "goto", {"countertop 2"}).ok());
        auto lettuce = plan::Expr{plan::Compare{plan::CompareOp::In,
                                                plan::box(plan::make_literal(Value("lettuce"))),
                                                plan::box(plan::make_var("last_observation"))}};
        auto after = evaluate_assertion(lettuce, {}, session);
        REQUIRE(after.ok());
        CHECK(after.value());
    }
    SUBCASE("holding compares against None and bound identifiers") {
        auto cond = plan::Expr{plan::Compare{plan::CompareOp::Eq,
                                             plan::box(plan::make_var("holding")),
                                             plan::box(plan::make_var("found_obj"))}};
        Bindings bindings{{"found_obj", Value("lettuce 1")}};
        auto empty_hands = evaluate_assertion(cond, bindings, session);
        REQUIRE(empty_hands.ok());
        CHECK(!empty_hands.value());

        REQUIRE(env::step(session, "goto", {"countertop 2"}).ok());
        REQUIRE(env::step(session, "take", {"lettuce 1", "countertop 2"}).ok());
        auto holding_now = evaluate_assertion(cond, bindings, session);
        REQUIRE(holding_now.ok());
        CHECK(holding_now.value());

        // The binding only matches the simulator's actual object id.
        Bindings wrong{{"found_obj", Value("lettuce 2")}};
        CHECK(!evaluate_assertion(cond, wrong, session).value());
    }
    SUBCASE("unbound variables are errors, not false") {
        auto cond = plan::Expr{plan::make_var("ghost")};
        auto result = evaluate_assertion(cond, {}, session);
        REQUIRE(!result.ok());
        CHECK(result.error().find("'ghost' is unbound") != std::string::npos);
    }
}

TEST_CASE("goal completion halts the plan mid-statement-stream") {
    // The revised plan's final put meets the goal; no statement after it runs
    // and the outcome is success even though the plan text ends there anyway.
    // Exercise the halt explicitly with a plan that keeps going after the put.
    const std::string source = R"(def solution(agent, start_from=1):
    # General plan: solve the task, then pointlessly wander.
    # [Step 1] Find the lettuce.
    for recep in ['fridge 1', 'countertop 1', 'countertop 2', 'countertop 3']:
        obs = goto(recep)
        if 'closed' in obs:
            obs = open(recep)
        if 'lettuce' in obs: break
    assert 'lettuce' in obs, report(f'I cannot find a lettuce in {location}.')
    # [Step 2] Take it, clean it, deliver it, then keep wandering.
    take(found, location)
    goto('sinkbasin 1')
    clean(found, 'sinkbasin 1')
    goto('diningtable 1')
    put(found, 'diningtable 1')
    goto('garbagecan 1')
)";
    env::EnvSession session = env::make_session(env::TaskType::Clean, kLettuceSeed);
    auto no_ask = [](const std::string&) -> Result<std::string> {
        return Result<std::string>::failure("no ask_llm expected");
    };
    plan::PlanAst plan_ast = parse_or_die(source);
    Bindings seeded{{"found", Value("lettuce 1")}};
    ExecutionState prior;
    prior.checkpoints[2] = Checkpoint{seeded, 0};
    ExecuteOptions options;
    options.start_from = 2;
    options.prior = &prior;

    // Drive the search manually so the checkpointed resume has a live world.
    REQUIRE(env::step(session, "goto", {"countertop 2"}).ok());

    EpisodeOutcome outcome = execute(plan_ast, session, no_ask, options);
    REQUIRE(outcome.status == OutcomeStatus::Success);
    // The trailing goto never ran.
    CHECK(commands(outcome.context).back() == "put lettuce 1 in/on diningtable 1");
    CHECK(session.state.agent_location == "diningtable 1");
}
