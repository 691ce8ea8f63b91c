#include "planloop/plan/diff.hpp"
#include "planloop/plan/parse.hpp"
#include "planloop/plan/print.hpp"
#include "planloop/plan/validate.hpp"
#include "support/golden.hpp"
#include "support/plan_gen.hpp"

#include <doctest.h>

#include <random>

using namespace planloop;
using namespace planloop::plan;

namespace {

PlanAst parse_ok(const std::string& text) {
    auto result = parse_plan(text);
    if (!result.ok()) FAIL("parse failed: ", result.error().to_string());
    return result.value();
}

ParseError parse_err(const std::string& text) {
    auto result = parse_plan(text);
    REQUIRE_FALSE(result.ok());
    return result.error();
}

std::string minimal_plan(const std::string& body) {
    return "def solution(agent, start_from=1):\n    # [Step 1] do the thing\n" + body;
}

} // namespace

TEST_CASE("golden plan parses into six sub-goals with assertions") {
    PlanAst ast = parse_ok(testsupport::golden_initial_plan());
    CHECK(ast.name == "solution");
    CHECK(ast.start_from_default == 1);
    REQUIRE(ast.preamble.size() == 1);
    REQUIRE(ast.subgoals.size() == 6);
    for (int i = 0; i < 6; ++i) CHECK(ast.subgoals[i].index == i + 1);
    for (int i = 0; i < 5; ++i) CHECK(ast.subgoals[i].assertion.has_value());
    CHECK_FALSE(ast.subgoals[5].assertion.has_value());
    CHECK(ast.subgoals[1].comment == "Go to each receptacle in the list until seeing a lettuce.");

    // Sub-goal 2 is the search loop with a break condition.
    REQUIRE(ast.subgoals[1].body.size() == 1);
    const auto* loop = std::get_if<ForEach>(&ast.subgoals[1].body[0].node);
    REQUIRE(loop != nullptr);
    CHECK(loop->var == "recep");
    CHECK(loop->body.size() == 2);
    CHECK(loop->break_when.has_value());

    // Sub-goal 3 holds the ask_llm identification.
    const auto* ask = std::get_if<AskLlm>(&ast.subgoals[2].body[0].node);
    REQUIRE(ask != nullptr);
    CHECK(ask->binding == "found");
}

TEST_CASE("golden plan survives an exact render/parse round trip") {
    PlanAst ast = parse_ok(testsupport::golden_initial_plan());
    std::string rendered = render_plan(ast);
    PlanAst reparsed = parse_ok(rendered);
    CHECK(reparsed == ast);
    // Canonical fixture: the golden text already is the canonical rendering.
    CHECK(rendered == testsupport::golden_initial_plan());
}

TEST_CASE("empty function body is a parse error") {
    ParseError err = parse_err("def solution(agent, start_from=1):\n");
    CHECK(err.message.find("empty") != std::string::npos);
}

TEST_CASE("non-contiguous step indices are a parse error") {
    std::string text = "def solution(agent, start_from=1):\n"
                       "    # [Step 1] first\n"
                       "    goto('fridge 1')\n"
                       "    assert True, report('x')\n"
                       "    # [Step 2] second\n"
                       "    goto('fridge 1')\n"
                       "    assert True, report('x')\n"
                       "    # [Step 4] fourth\n"
                       "    goto('fridge 1')\n";
    ParseError err = parse_err(text);
    CHECK(err.message.find("non-contiguous") != std::string::npos);
    CHECK(err.line == 8);
}

TEST_CASE("statement before the first step marker is rejected") {
    std::string text = "def solution(agent, start_from=1):\n"
                       "    x = 'hello'\n"
                       "    # [Step 1] first\n"
                       "    goto('fridge 1')\n";
    ParseError err = parse_err(text);
    CHECK(err.line == 2);
    CHECK(err.message.find("[Step 1]") != std::string::npos);
}

TEST_CASE("non-final sub-goal without assertion is rejected") {
    std::string text = "def solution(agent, start_from=1):\n"
                       "    # [Step 1] first\n"
                       "    goto('fridge 1')\n"
                       "    # [Step 2] second\n"
                       "    goto('shelf 1')\n";
    ParseError err = parse_err(text);
    CHECK(err.message.find("missing its assertion") != std::string::npos);
}

TEST_CASE("assert must close its sub-goal") {
    ParseError err = parse_err(minimal_plan("    assert True, report('x')\n    goto('fridge 1')\n"));
    CHECK(err.message.find("after the assertion") != std::string::npos);
}

TEST_CASE("parser rejects stray syntax") {
    SUBCASE("tab indentation") {
        ParseError err = parse_err("def solution(agent, start_from=1):\n\tgoto('a')\n");
        CHECK(err.message.find("tab") != std::string::npos);
    }
    SUBCASE("trailing comment") {
        ParseError err = parse_err(minimal_plan("    goto('fridge 1')  # hop\n"));
        CHECK(err.message.find("comment") != std::string::npos);
    }
    SUBCASE("ask_llm without binding") {
        ParseError err = parse_err(minimal_plan("    ask_llm('what')\n"));
        CHECK(err.message.find("binding") != std::string::npos);
    }
    SUBCASE("assert inside a loop") {
        ParseError err = parse_err(
            minimal_plan("    for x in ['a']:\n        assert True, report('x')\n"));
        CHECK(err.message.find("sub-goal level") != std::string::npos);
    }
    SUBCASE("break not last in loop body") {
        ParseError err = parse_err(minimal_plan(
            "    for x in ['a']:\n        if True: break\n        goto(x)\n"));
        CHECK(err.message.find("last statement") != std::string::npos);
    }
    SUBCASE("unterminated string") {
        ParseError err = parse_err(minimal_plan("    x = 'oops\n"));
        CHECK(err.message.find("unterminated") != std::string::npos);
    }
    SUBCASE("malformed def header") {
        ParseError err = parse_err("def solution(robot, start_from=1):\n    # [Step 1] x\n    goto('a')\n");
        CHECK(err.line == 1);
    }
    SUBCASE("empty sub-goal") {
        ParseError err = parse_err("def solution(agent, start_from=1):\n"
                                   "    # [Step 1] first\n"
                                   "    # [Step 2] second\n"
                                   "    goto('fridge 1')\n");
        CHECK(err.message.find("no statements") != std::string::npos);
    }
}

TEST_CASE("parse error positions point at the offending line") {
    std::string text = "def solution(agent, start_from=1):\n"
                       "    # [Step 1] first\n"
                       "    x = (True and\n";
    ParseError err = parse_err(text);
    CHECK(err.line == 3);
    CHECK(err.column > 4);
}

TEST_CASE("expressions keep python precedence through the round trip") {
    std::string body = "    x = 'a' in last_observation and not holding == 'b' or False\n";
    PlanAst ast = parse_ok(minimal_plan(body));
    const auto* assign = std::get_if<Assign>(&ast.subgoals[0].body[0].node);
    REQUIRE(assign != nullptr);
    const auto* top = std::get_if<BoolExpr>(&assign->value.node);
    REQUIRE(top != nullptr);
    CHECK(top->kind == BoolKind::Or);
    REQUIRE(top->operands.size() == 2);
    const auto* left = std::get_if<BoolExpr>(&top->operands[0]->node);
    REQUIRE(left != nullptr);
    CHECK(left->kind == BoolKind::And);

    CHECK(render_expr(assign->value) ==
          "'a' in last_observation and not holding == 'b' or False");
    CHECK(parse_ok(render_plan(ast)) == ast);
}

TEST_CASE("parenthesised groups survive rendering") {
    std::string body = "    x = ('a' == 'b') == False\n    y = not (True or False)\n";
    PlanAst ast = parse_ok(minimal_plan(body));
    CHECK(parse_ok(render_plan(ast)) == ast);
    const auto* assign = std::get_if<Assign>(&ast.subgoals[0].body[0].node);
    CHECK(render_expr(assign->value) == "('a' == 'b') == False");
}

TEST_CASE("validator accepts the golden plan against the household catalog") {
    PlanAst ast = parse_ok(testsupport::golden_initial_plan());
    auto diags = validate_plan(ast, testsupport::generator_catalog());
    CHECK(diags.empty());
}

TEST_CASE("validator flags unknown actions and arity mismatches") {
    PlanAst ast = parse_ok(minimal_plan("    fly_to('moon 1')\n    take('a')\n"));
    auto diags = validate_plan(ast, testsupport::generator_catalog());
    REQUIRE(diags.size() == 2);
    CHECK(diags[0].severity == Severity::Error);
    CHECK(diags[0].subgoal == 1);
    CHECK(diags[0].statement == 1);
    CHECK(diags[0].message == "unknown action 'fly_to'");
    CHECK(diags[1].message == "action 'take' expects 2 arguments, got 1");
}

TEST_CASE("validator flags use before binding with a location") {
    PlanAst ast = parse_ok(minimal_plan("    goto(found_obj)\n"));
    auto diags = validate_plan(ast, testsupport::generator_catalog());
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].severity == Severity::Error);
    CHECK(diags[0].subgoal == 1);
    CHECK(diags[0].statement == 1);
    CHECK(diags[0].message.find("found_obj") != std::string::npos);
}

TEST_CASE("validator is optimistic about loop and branch bindings") {
    std::string body = "    for recep in ['shelf 1']:\n"
                       "        obs = goto(recep)\n"
                       "    x = obs\n";
    PlanAst ast = parse_ok(minimal_plan(body));
    auto diags = validate_plan(ast, testsupport::generator_catalog());
    CHECK(diags.empty());
}

TEST_CASE("validator flags ask_llm re-binding inside one sub-goal") {
    std::string body = "    found = ask_llm('which')\n"
                       "    found = ask_llm('again')\n"
                       "    goto(found)\n";
    PlanAst ast = parse_ok(minimal_plan(body));
    auto diags = validate_plan(ast, testsupport::generator_catalog());
    REQUIRE(has_errors(diags));
    REQUIRE(diags.size() == 2);
    // The shadowed first result is also reported as never used.
    CHECK(diags[0].severity == Severity::Warning);
    CHECK(diags[0].message.find("never used") != std::string::npos);
    CHECK(diags[1].severity == Severity::Error);
    CHECK(diags[1].message.find("re-bound") != std::string::npos);

    // The same identifier in a different sub-goal is fine.
    std::string two_steps = "def solution(agent, start_from=1):\n"
                            "    # [Step 1] ask once\n"
                            "    found = ask_llm('which')\n"
                            "    goto(found)\n"
                            "    assert True, report('x')\n"
                            "    # [Step 2] ask again\n"
                            "    found = ask_llm('again')\n"
                            "    goto(found)\n";
    auto diags2 = validate_plan(parse_ok(two_steps), testsupport::generator_catalog());
    CHECK(diags2.empty());
}

TEST_CASE("validator warns without blocking") {
    std::string body = "    for x in []:\n"
                       "        goto(x)\n"
                       "    note = ask_llm('which shelf')\n";
    PlanAst ast = parse_ok(minimal_plan(body));
    auto diags = validate_plan(ast, testsupport::generator_catalog());
    REQUIRE(diags.size() == 2);
    CHECK(diags[0].severity == Severity::Warning);
    CHECK(diags[0].message.find("empty literal list") != std::string::npos);
    CHECK(diags[1].severity == Severity::Warning);
    CHECK(diags[1].message.find("never used") != std::string::npos);
    CHECK_FALSE(has_errors(diags));
}

TEST_CASE("diagnostics render one per line for the CLI") {
    std::vector<Diagnostic> diags = {
        {Severity::Error, 3, 2, "unknown action 'sweep'"},
        {Severity::Warning, 4, 1, "ask_llm result 'x' is never used"},
    };
    CHECK(render_diagnostics(diags) == "error 3:2 unknown action 'sweep'\n"
                                       "warning 4:1 ask_llm result 'x' is never used\n");
}

TEST_CASE("diff pinpoints the first structural divergence") {
    PlanAst initial = parse_ok(testsupport::golden_initial_plan());
    PlanAst revised = parse_ok(testsupport::golden_revised_plan());
    CHECK(diff_first_divergence(initial, revised) == 3);
    CHECK(diff_first_divergence(revised, initial) == 3);
}

TEST_CASE("diff of identical plans is the N+1 sentinel") {
    PlanAst ast = parse_ok(testsupport::golden_initial_plan());
    CHECK(diff_first_divergence(ast, ast) == 7);
}

TEST_CASE("diff ignores comment rewording") {
    PlanAst a = parse_ok(testsupport::golden_initial_plan());
    PlanAst b = a;
    b.subgoals[0].comment = "Collect candidate receptacles.";
    b.preamble = {"totally different preamble"};
    CHECK(diff_first_divergence(a, b) == 7);
}

TEST_CASE("diff treats a shared prefix as divergence past the shorter plan") {
    PlanAst a = parse_ok(testsupport::golden_initial_plan());
    PlanAst b = a;
    b.subgoals.pop_back();
    CHECK(diff_first_divergence(a, b) == 6);
    CHECK(diff_first_divergence(b, a) == 6);
}

TEST_CASE("random valid plans round-trip through render and parse") {
    std::mt19937 rng(20260816);
    for (int i = 0; i < 300; ++i) {
        PlanAst ast = testsupport::random_plan(rng);
        std::string rendered = render_plan(ast);
        auto reparsed = parse_plan(rendered);
        if (!reparsed.ok())
            FAIL("iteration ", i, ": ", reparsed.error().to_string(), "\n", rendered);
        if (!(reparsed.value() == ast))
            FAIL("iteration ", i, ": round-trip mismatch\n", rendered);
        auto diags = validate_plan(ast, testsupport::generator_catalog());
        CHECK_FALSE(has_errors(diags));
        CHECK(diff_first_divergence(ast, reparsed.value()) == ast.subgoal_count() + 1);
    }
}
