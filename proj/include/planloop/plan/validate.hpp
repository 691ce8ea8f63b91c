#pragma once

#include "planloop/plan/ast.hpp"

#include <string>
#include <vector>

namespace planloop::plan {

struct ActionSpec {
    std::string name;
    int arity = 0;
};

using ActionCatalog = std::vector<ActionSpec>;

// Static checks against an action catalog: unknown actions, wrong arities,
// use-before-bind (optimistic: any binding inside a reachable block counts),
// ask_llm re-binding within a sub-goal. Warnings don't block execution.
std::vector<Diagnostic> validate_plan(const PlanAst& ast, const ActionCatalog& catalog);

bool has_errors(const std::vector<Diagnostic>& diags);

} // namespace planloop::plan
