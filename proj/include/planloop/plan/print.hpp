#pragma once

#include "planloop/plan/ast.hpp"

#include <string>

namespace planloop::plan {

// Canonical renderer: 4-space indent, single-quoted strings, spaced
// operators. parse_plan(render_plan(p)) == p for every valid plan.
std::string render_plan(const PlanAst& ast);

std::string render_expr(const Expr& expr);
std::string render_statement(const Statement& stmt, int depth);
std::string render_subgoal(const SubGoal& sg);

} // namespace planloop::plan
